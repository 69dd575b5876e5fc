#include "pegtrace/polygon_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pegtrace {

Polygon polygon_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw PegError(ErrorCode::InputError,
                   std::string("polygon JSON parse failed: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
    throw PegError(ErrorCode::InputError,
                   "polygon JSON needs a \"vertices\" array");
  }
  std::vector<Point> vs;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number()) {
      throw PegError(ErrorCode::InputError,
                     "each vertex must be a [x, y] number pair");
    }
    vs.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return Polygon::validate(std::move(vs));
}

std::string polygon_to_json(const Polygon& p) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Point& v : p.vertices()) {
    j["vertices"].push_back({v.x, v.y});
  }
  return j.dump(2) + "\n";
}

Polygon load_polygon(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw PegError(ErrorCode::InputError, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return polygon_from_json(ss.str());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw PegError(ErrorCode::InputError, "cannot write " + path);
  }
  out << content;
}

}  // namespace pegtrace
