#ifndef PEGTRACE_GEOMETRY_HPP
#define PEGTRACE_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "pegtrace/errors.hpp"

namespace pegtrace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2 operator/(double k) const { return {x / k, y / k}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

using Point = Vec2;

inline Vec2 operator*(double k, const Vec2& v) { return v * k; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }
inline Vec2 normalized(const Vec2& v) { return v / norm(v); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

// Shoelace signed area of a closed chain; the last point connects back to the
// first. Counterclockwise chains are positive.
double signed_area(std::span<const Point> chain);

// Winding count of the closed walk s1 -> s2 -> s3 -> s4 -> s1 around the
// boundary circle: 1 for counterclockwise-monotone, 3 for clockwise-monotone,
// 2 for interleaved, 0 when all four parameters tie.
int cyclic_winding(const std::array<double, 4>& s, double perimeter,
                   double tie_eps);

// True iff the four boundary parameters are cyclically monotone in either
// rotational sense. Ties within tie_eps count as monotone.
bool cyclic_order_ok(const std::array<double, 4>& s, double perimeter,
                     double tie_eps);

struct PolygonEdge {
  Point a;       // start vertex
  Vec2 dir;      // unit direction toward the next vertex
  double len;    // edge length
  double s0;     // cumulative boundary parameter of the start vertex
};

// Simple closed polygon, stored counterclockwise, with an arclength
// parametrization of its boundary.
class Polygon {
 public:
  // Validates and canonicalizes a raw vertex chain. Throws PegError with
  // TooFewVertices, ZeroLengthEdge, CollinearRun or SelfIntersecting.
  static Polygon validate(std::vector<Point> vertices, double eps_scale = 1e-9);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<PolygonEdge>& edges() const { return edges_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  double perimeter() const { return perimeter_; }
  double area() const { return area_; }
  double eps_geo() const { return eps_geo_; }
  bool reversed_on_load() const { return reversed_; }

  double wrap(double s) const;
  int edge_index_at(double s) const;
  Point boundary_point(double s) const;

  // Inverse parametrization; throws NotOnBoundary when q is farther than tol
  // (default eps_geo) from the boundary.
  double boundary_param(const Point& q) const;
  std::optional<double> try_boundary_param(const Point& q, double tol) const;

  double distance_to_boundary(const Point& q) const;
  bool contains(const Point& q) const;  // inside or on the boundary

  int prev_edge(int e) const { return (e + size() - 1) % size(); }
  int next_edge(int e) const { return (e + 1) % size(); }

 private:
  Polygon() = default;
  std::vector<Point> vertices_;
  std::vector<PolygonEdge> edges_;
  double perimeter_ = 0.0;
  double area_ = 0.0;
  double eps_geo_ = 0.0;
  bool reversed_ = false;
};

// Cyclically labeled rectangle, possibly degenerate (X == 0 or Y == 0).
struct LabeledRectangle {
  std::array<Point, 4> v{};
  double X = 0.0;  // length of side v[0]v[1]
  double Y = 0.0;  // length of side v[1]v[2]

  static LabeledRectangle from_vertices(const Point& r1, const Point& r2,
                                        const Point& r3, const Point& r4);

  const Point& operator[](int i) const { return v[static_cast<size_t>(i)]; }
  Point& operator[](int i) { return v[static_cast<size_t>(i)]; }
};

double closure_residual(const LabeledRectangle& r);
double orthogonality_residual(const LabeledRectangle& r);
bool rectangle_ok(const LabeledRectangle& r);
bool rectangle_degenerate(const LabeledRectangle& r, double tol);

// Cyclic relabeling by k positions: result vertex j is input vertex j+k.
LabeledRectangle shifted(const LabeledRectangle& r, int k);

// Max vertex distance between equally labeled rectangles.
double rect_distance(const LabeledRectangle& a, const LabeledRectangle& b);

// True iff all four vertices lie on the boundary (within tol) in cyclic order.
bool graces(const Polygon& p, const LabeledRectangle& r, double tol);

}  // namespace pegtrace

#endif
