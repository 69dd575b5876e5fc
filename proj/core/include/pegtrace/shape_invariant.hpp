#ifndef PEGTRACE_SHAPE_INVARIANT_HPP
#define PEGTRACE_SHAPE_INVARIANT_HPP

#include <span>
#include <vector>

#include "pegtrace/geometry.hpp"
#include "pegtrace/tracer.hpp"

namespace pegtrace {

// Side-length path (X(t), Y(t)) of a traced component, endpoints snapped
// onto the coordinate axes for arc classes.
struct ShapeCurve {
  std::vector<Vec2> pts;
  std::vector<double> params;  // arc-length parameter of the source samples
  ComponentClass cls = ComponentClass::Hyperbolic;
};

enum class Augmentation { ViaOrigin, AlongAxis, None };

// Shape curve closed into a loop along the coordinate axes.
struct ShapeLoop {
  std::vector<Vec2> chain;
  Augmentation kind = Augmentation::None;
};

// Signed areas of the four regions between the rectangle sides and the
// boundary arcs, and their alternating sum.
struct RegionAreas {
  double a[4] = {0, 0, 0, 0};
  double alternating() const { return (a[0] + a[2]) - (a[1] + a[3]); }
};

ShapeCurve shape_curve(const ArcComponent& arc);

// Hyperbolic curves close through the origin, null curves along their axis,
// loops are already closed. Throws ClassMismatch when the endpoints do not
// lie on the axes the class requires.
ShapeLoop shape_loop(const ShapeCurve& curve);

// Exact integral of -X dY + Y dX over a closed polyline; equals -2 times the
// enclosed signed area identically.
double omega_integral(std::span<const Vec2> chain);

// Throws NotGracing when the rectangle's vertices are off the boundary or
// out of cyclic order.
RegionAreas region_areas(const Polygon& p, const LabeledRectangle& r);

// Max central-difference residual of dA/dt against Y X' - X Y' at roughly
// the requested sample spacing, restricted to same-chart triples.
double check_differential(const Polygon& p, const ArcComponent& arc,
                          double spacing);

struct SweepReport {
  ComponentClass cls;
  double loop_area = 0;
  double target = 0;        // |area(P)| for hyperbolic, 0 otherwise
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

// Checks the swept-area identity for one component: hyperbolic shape loops
// enclose (up to sign) the polygon area, null and closed ones enclose zero.
SweepReport verify_sweep(const Polygon& p, const ArcComponent& arc,
                         const TraceConfig& cfg);

}  // namespace pegtrace

#endif
