#ifndef PEGTRACE_POLYGON_IO_HPP
#define PEGTRACE_POLYGON_IO_HPP

#include <string>

#include "pegtrace/geometry.hpp"

namespace pegtrace {

// Polygon file format: { "vertices": [[x, y], ...] }. Vertex order is kept
// as given; orientation is normalized on load. Throws InputError on parse
// problems and the usual validation errors otherwise.
Polygon polygon_from_json(const std::string& text);
std::string polygon_to_json(const Polygon& p);

Polygon load_polygon(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pegtrace

#endif
