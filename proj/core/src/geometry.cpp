#include "pegtrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pegtrace {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::ZeroLengthEdge: return "ZeroLengthEdge";
    case ErrorCode::CollinearRun: return "CollinearRun";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::AllParallelToL4: return "AllParallelToL4";
    case ErrorCode::DegenerateChart: return "DegenerateChart";
    case ErrorCode::OffHyperplane: return "OffHyperplane";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::AmbiguousTangency: return "AmbiguousTangency";
    case ErrorCode::TieBreakFailure: return "TieBreakFailure";
    case ErrorCode::NoViableChart: return "NoViableChart";
    case ErrorCode::DeadEnd: return "DeadEnd";
    case ErrorCode::StepBudgetExhausted: return "StepBudgetExhausted";
    case ErrorCode::CorrectorDivergence: return "CorrectorDivergence";
    case ErrorCode::UnmatchedTerminalDiameter: return "UnmatchedTerminalDiameter";
    case ErrorCode::RepeatBoundViolated: return "RepeatBoundViolated";
    case ErrorCode::TrickyDiameter: return "TrickyDiameter";
    case ErrorCode::ClassMismatch: return "ClassMismatch";
    case ErrorCode::NotGracing: return "NotGracing";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NotReallyDistinct: return "NotReallyDistinct";
    case ErrorCode::EdgeAssignmentChanged: return "EdgeAssignmentChanged";
    case ErrorCode::GenerationBudgetExceeded: return "GenerationBudgetExceeded";
    case ErrorCode::InputError: return "InputError";
  }
  return "UnknownError";
}

double signed_area(std::span<const Point> chain) {
  const size_t n = chain.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Point& p = chain[i];
    const Point& q = chain[(i + 1) % n];
    acc += cross(p, q);
  }
  return 0.5 * acc;
}

int cyclic_winding(const std::array<double, 4>& s, double perimeter,
                   double tie_eps) {
  // Sum of forward gaps around the cycle counts how often the walk winds
  // around the boundary circle: monotone sequences wind once (or three times
  // read against the boundary direction), interleaved ones twice.
  double total = 0.0;
  for (int j = 0; j < 4; ++j) {
    double d = std::fmod(s[(j + 1) % 4] - s[j], perimeter);
    if (d < 0) d += perimeter;
    if (d > perimeter - tie_eps) d = 0.0;  // tiny negative gap = tie
    total += d;
  }
  return static_cast<int>(std::lround(total / perimeter));
}

bool cyclic_order_ok(const std::array<double, 4>& s, double perimeter,
                     double tie_eps) {
  return cyclic_winding(s, perimeter, tie_eps) != 2;
}

namespace {

double point_segment_distance(const Point& q, const Point& a, const Point& b,
                              double* s_out = nullptr) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0 ? dot(q - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (s_out) *s_out = t;
  return distance(q, a + ab * t);
}

double segment_segment_distance(const Point& a, const Point& b, const Point& c,
                                const Point& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
  double best = point_segment_distance(a, c, d);
  best = std::min(best, point_segment_distance(b, c, d));
  best = std::min(best, point_segment_distance(c, a, b));
  best = std::min(best, point_segment_distance(d, a, b));
  return best;
}

}  // namespace

Polygon Polygon::validate(std::vector<Point> vertices, double eps_scale) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) {
    throw PegError(ErrorCode::TooFewVertices,
                   "polygon needs at least 3 vertices, got " +
                       std::to_string(n));
  }
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw PegError(ErrorCode::InputError, "non-finite vertex coordinate");
    }
  }

  double perim_raw = 0.0;
  for (int i = 0; i < n; ++i) {
    perim_raw += distance(vertices[static_cast<size_t>(i)],
                          vertices[static_cast<size_t>((i + 1) % n)]);
  }
  const double eps = eps_scale * perim_raw;
  if (!(perim_raw > 0.0)) {
    throw PegError(ErrorCode::ZeroLengthEdge, "all vertices coincide");
  }

  for (int i = 0; i < n; ++i) {
    const double len = distance(vertices[static_cast<size_t>(i)],
                                vertices[static_cast<size_t>((i + 1) % n)]);
    if (len <= eps) {
      throw PegError(ErrorCode::ZeroLengthEdge,
                     "edge " + std::to_string(i) + " has length " +
                         std::to_string(len));
    }
  }

  // Three consecutive collinear vertices are rejected: merging them silently
  // would change edge indexing.
  for (int i = 0; i < n; ++i) {
    const Point& a = vertices[static_cast<size_t>((i + n - 1) % n)];
    const Point& b = vertices[static_cast<size_t>(i)];
    const Point& c = vertices[static_cast<size_t>((i + 1) % n)];
    const Vec2 u = normalized(b - a);
    const Vec2 w = normalized(c - b);
    if (std::abs(cross(u, w)) <= 1e-9) {
      throw PegError(ErrorCode::CollinearRun,
                     "vertices around index " + std::to_string(i) +
                         " are collinear");
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      const double d = segment_segment_distance(
          vertices[static_cast<size_t>(i)],
          vertices[static_cast<size_t>((i + 1) % n)],
          vertices[static_cast<size_t>(j)],
          vertices[static_cast<size_t>((j + 1) % n)]);
      if (d <= eps) {
        throw PegError(ErrorCode::SelfIntersecting,
                       "edges " + std::to_string(i) + " and " +
                           std::to_string(j) + " intersect");
      }
    }
  }

  Polygon out;
  out.reversed_ = signed_area(std::span<const Point>(vertices)) < 0;
  if (out.reversed_) std::reverse(vertices.begin(), vertices.end());
  out.vertices_ = std::move(vertices);

  out.edges_.reserve(static_cast<size_t>(n));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& a = out.vertices_[static_cast<size_t>(i)];
    const Point& b = out.vertices_[static_cast<size_t>((i + 1) % n)];
    PolygonEdge e;
    e.a = a;
    e.len = distance(a, b);
    e.dir = (b - a) / e.len;
    e.s0 = s;
    s += e.len;
    out.edges_.push_back(e);
  }
  out.perimeter_ = s;
  out.area_ = signed_area(std::span<const Point>(out.vertices_));
  out.eps_geo_ = eps_scale * out.perimeter_;
  return out;
}

double Polygon::wrap(double s) const {
  double r = std::fmod(s, perimeter_);
  if (r < 0) r += perimeter_;
  return r;
}

int Polygon::edge_index_at(double s) const {
  const double sw = wrap(s);
  int lo = 0, hi = size() - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (edges_[static_cast<size_t>(mid)].s0 <= sw) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

Point Polygon::boundary_point(double s) const {
  const double sw = wrap(s);
  const PolygonEdge& e = edges_[static_cast<size_t>(edge_index_at(sw))];
  return e.a + e.dir * (sw - e.s0);
}

std::optional<double> Polygon::try_boundary_param(const Point& q,
                                                  double tol) const {
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (const PolygonEdge& e : edges_) {
    double t = 0.0;
    const double d =
        point_segment_distance(q, e.a, e.a + e.dir * e.len, &t);
    if (d < best) {
      best = d;
      best_s = e.s0 + t * e.len;
    }
  }
  if (best > tol) return std::nullopt;
  return wrap(best_s);
}

double Polygon::boundary_param(const Point& q) const {
  auto s = try_boundary_param(q, eps_geo_);
  if (!s) {
    throw PegError(ErrorCode::NotOnBoundary,
                   "point is not on the polygon boundary");
  }
  return *s;
}

double Polygon::distance_to_boundary(const Point& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const PolygonEdge& e : edges_) {
    best = std::min(best, point_segment_distance(q, e.a, e.a + e.dir * e.len));
  }
  return best;
}

bool Polygon::contains(const Point& q) const {
  if (distance_to_boundary(q) <= eps_geo_) return true;
  // Ray cast toward +x.
  bool inside = false;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    const Point& a = vertices_[static_cast<size_t>(i)];
    const Point& b = vertices_[static_cast<size_t>((i + 1) % n)];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double xcross = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (xcross > q.x) inside = !inside;
    }
  }
  return inside;
}

LabeledRectangle LabeledRectangle::from_vertices(const Point& r1,
                                                 const Point& r2,
                                                 const Point& r3,
                                                 const Point& r4) {
  LabeledRectangle r;
  r.v = {r1, r2, r3, r4};
  r.X = distance(r1, r2);
  r.Y = distance(r2, r3);
  return r;
}

double closure_residual(const LabeledRectangle& r) {
  return norm(r.v[0] + r.v[2] - r.v[1] - r.v[3]);
}

double orthogonality_residual(const LabeledRectangle& r) {
  return std::abs(dot(r.v[0] - r.v[1], r.v[2] - r.v[1]));
}

bool rectangle_ok(const LabeledRectangle& r) {
  const double scale = r.X + r.Y + 1.0;
  return closure_residual(r) <= 1e-9 * scale &&
         orthogonality_residual(r) <= 1e-9 * scale * scale;
}

bool rectangle_degenerate(const LabeledRectangle& r, double tol) {
  return r.X <= tol || r.Y <= tol;
}

LabeledRectangle shifted(const LabeledRectangle& r, int k) {
  k = ((k % 4) + 4) % 4;
  return LabeledRectangle::from_vertices(
      r.v[static_cast<size_t>(k)], r.v[static_cast<size_t>((k + 1) % 4)],
      r.v[static_cast<size_t>((k + 2) % 4)], r.v[static_cast<size_t>((k + 3) % 4)]);
}

double rect_distance(const LabeledRectangle& a, const LabeledRectangle& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) {
    m = std::max(m, distance(a.v[static_cast<size_t>(i)],
                             b.v[static_cast<size_t>(i)]));
  }
  return m;
}

bool graces(const Polygon& p, const LabeledRectangle& r, double tol) {
  std::array<double, 4> s{};
  for (int i = 0; i < 4; ++i) {
    auto si = p.try_boundary_param(r.v[static_cast<size_t>(i)], tol);
    if (!si) return false;
    s[static_cast<size_t>(i)] = *si;
  }
  // The labels must follow the loop's own (counterclockwise) cyclic order;
  // reversed labelings are not gracing rectangles of the polygon.
  return cyclic_winding(s, p.perimeter(), 1e-9 * p.perimeter()) <= 1;
}

}  // namespace pegtrace
