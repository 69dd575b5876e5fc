#ifndef PEGTRACE_SVG_HPP
#define PEGTRACE_SVG_HPP

#include <string>
#include <vector>

#include "pegtrace/diameters.hpp"
#include "pegtrace/tracer.hpp"

namespace pegtrace {

// Self-contained SVG of the polygon with its positive diameters drawn.
std::string svg_polygon_diameters(const Polygon& p,
                                  const std::vector<Diameter>& positive);

// Shape curves of the traced components with the closed loops shaded,
// axes drawn, one figure for all components.
std::string svg_shape_curves(const Polygon& p,
                             const std::vector<ArcComponent>& comps);

}  // namespace pegtrace

#endif
