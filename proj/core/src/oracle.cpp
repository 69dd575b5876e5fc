#include "pegtrace/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pegtrace {

namespace {

struct Assignment {
  int edge[4];
  double t[4];  // parameters on the assigned edge lines
};

// Least-norm Gauss-Newton for the three rectangle conditions (closure onto
// the four edge lines plus one right angle) in the four line parameters.
// Iterates to quadratic-convergence stall; succeeds when the residual ends
// below tol.
bool refine_on_lines(const Polygon& p, Assignment& as, double tol) {
  const auto& edges = p.edges();
  auto pt = [&](int j) {
    const PolygonEdge& e = edges[static_cast<size_t>(as.edge[j])];
    return e.a + e.dir * as.t[j];
  };
  auto dir = [&](int j) -> const Vec2& {
    return edges[static_cast<size_t>(as.edge[j])].dir;
  };

  const double target = 1e-14 * (1.0 + p.perimeter());
  double fnorm_prev = 1e300;
  for (int it = 0; it < 60; ++it) {
    const Point p1 = pt(0), p2 = pt(1), p3 = pt(2), p4 = pt(3);
    const Vec2 closure = p1 + p3 - p2 - p4;
    const double angle = dot(p1 - p2, p3 - p2);
    const double f[3] = {closure.x, closure.y, angle};
    const double fnorm = std::abs(f[0]) + std::abs(f[1]) +
                         std::abs(f[2]) / (1.0 + p.perimeter());
    if (fnorm <= target) return true;
    if (fnorm >= 0.5 * fnorm_prev && it > 3) return fnorm <= tol;

    // Jacobian (3 x 4).
    double J[3][4];
    const Vec2 u1 = dir(0), u2 = dir(1), u3 = dir(2), u4 = dir(3);
    J[0][0] = u1.x; J[1][0] = u1.y; J[2][0] = dot(u1, p3 - p2);
    J[0][1] = -u2.x; J[1][1] = -u2.y; J[2][1] = -dot(u2, (p3 - p2) + (p1 - p2));
    J[0][2] = u3.x; J[1][2] = u3.y; J[2][2] = dot(p1 - p2, u3);
    J[0][3] = -u4.x; J[1][3] = -u4.y; J[2][3] = 0.0;

    // Solve J J^T y = -f, step = J^T y.
    double g[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += J[r][k] * J[c][k];
        g[r][c] = acc;
      }
    }
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if (std::abs(det) < 1e-300) return false;
    double inv[3][3];
    inv[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / det;
    inv[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / det;
    inv[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / det;
    inv[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) / det;
    inv[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / det;
    inv[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / det;
    inv[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / det;
    inv[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / det;
    inv[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / det;

    double y[3];
    for (int r = 0; r < 3; ++r) {
      y[r] = -(inv[r][0] * f[0] + inv[r][1] * f[1] + inv[r][2] * f[2]);
    }
    double step[4];
    for (int k = 0; k < 4; ++k) {
      step[k] = J[0][k] * y[0] + J[1][k] * y[1] + J[2][k] * y[2];
    }

    double scale = 1.0;
    for (int damp = 0; damp < 10; ++damp) {
      Assignment trial = as;
      for (int k = 0; k < 4; ++k) trial.t[k] += scale * step[k];
      const auto& te = edges;
      auto tpt = [&](int j) {
        const PolygonEdge& e = te[static_cast<size_t>(trial.edge[j])];
        return e.a + e.dir * trial.t[j];
      };
      const Point q1 = tpt(0), q2 = tpt(1), q3 = tpt(2), q4 = tpt(3);
      const Vec2 cl = q1 + q3 - q2 - q4;
      const double an = dot(q1 - q2, q3 - q2);
      const double fn = std::abs(cl.x) + std::abs(cl.y) +
                        std::abs(an) / (1.0 + p.perimeter());
      if (fn < fnorm || damp == 9) {
        as = trial;
        break;
      }
      scale *= 0.5;
    }
    fnorm_prev = fnorm;
  }
  return false;
}

}  // namespace

std::vector<OracleHit> shoot(const Polygon& p, double s1, double s2,
                             double coarse_tol) {
  std::vector<OracleHit> hits;
  const Point p1 = p.boundary_point(s1);
  const Point p2 = p.boundary_point(s2);
  const Vec2 base = p2 - p1;
  const double blen = norm(base);
  if (blen <= p.eps_geo()) return hits;
  const Vec2 nrm = perp(base / blen);

  // Candidate heights along the normal, from rays based at both corners.
  // Basing at one corner alone misses labelings whose far side runs along a
  // polygon edge (the ray is collinear with that edge).
  std::vector<double> heights;
  for (const Point& base : {p2, p1}) {
    for (const PolygonEdge& e : p.edges()) {
      const double denom = cross(nrm, e.dir);
      if (std::abs(denom) < 1e-14) continue;
      const Vec2 rhs = e.a - base;
      const double h = cross(rhs, e.dir) / denom;
      const double t = cross(rhs, nrm) / denom;
      if (t < 0 || t > e.len) continue;
      if (std::abs(h) <= coarse_tol) continue;  // trivial doubled chord band
      heights.push_back(h);
    }
  }
  std::sort(heights.begin(), heights.end());
  double last = -1e300;
  for (const double h : heights) {
    if (h - last <= 1e-12 * p.perimeter()) continue;
    last = h;
    const Point p3 = p2 + nrm * h;
    const Point p4 = p1 + nrm * h;
    const double residual =
        std::max(p.distance_to_boundary(p3), p.distance_to_boundary(p4));
    if (residual > coarse_tol) continue;
    auto s3 = p.try_boundary_param(p3, coarse_tol);
    auto s4 = p.try_boundary_param(p4, coarse_tol);
    if (!s3 || !s4) continue;
    if (cyclic_winding({p.wrap(s1), p.wrap(s2), *s3, *s4}, p.perimeter(),
                       coarse_tol) > 1)
      continue;
    OracleHit hit;
    hit.rect = LabeledRectangle::from_vertices(p1, p2, p3, p4);
    hit.residual = residual;
    hits.push_back(hit);
  }
  return hits;
}

LabeledRectangle newton_refine(const Polygon& p, const OracleHit& approx) {
  const double tol = p.eps_geo();
  Assignment as{};
  for (int j = 0; j < 4; ++j) {
    const auto s = p.try_boundary_param(approx.rect[j], 4.0 * approx.residual +
                                                            0.05 * p.perimeter());
    if (!s) {
      throw PegError(ErrorCode::NotConverged,
                     "hit vertex is too far from the boundary");
    }
    const int e = p.edge_index_at(*s);
    as.edge[j] = e;
    as.t[j] = *s - p.edges()[static_cast<size_t>(e)].s0;
  }

  for (int redispatch = 0; redispatch < 8; ++redispatch) {
    if (!refine_on_lines(p, as, tol)) {
      throw PegError(ErrorCode::NotConverged, "rectangle refinement stalled");
    }
    // Check the line parameters stayed on their segments.
    bool ok = true;
    for (int j = 0; j < 4; ++j) {
      const PolygonEdge& e = p.edges()[static_cast<size_t>(as.edge[j])];
      if (as.t[j] < -tol) {
        as.edge[j] = p.prev_edge(as.edge[j]);
        as.t[j] = p.edges()[static_cast<size_t>(as.edge[j])].len;
        ok = false;
      } else if (as.t[j] > e.len + tol) {
        as.edge[j] = p.next_edge(as.edge[j]);
        as.t[j] = 0.0;
        ok = false;
      }
    }
    if (!ok) continue;

    const auto& edges = p.edges();
    auto pt = [&](int j) {
      const PolygonEdge& e = edges[static_cast<size_t>(as.edge[j])];
      return e.a + e.dir * std::clamp(as.t[j], 0.0, e.len);
    };
    const Point r1 = pt(0), r2 = pt(1), r3 = pt(2);
    LabeledRectangle rect =
        LabeledRectangle::from_vertices(r1, r2, r3, r1 - r2 + r3);
    if (!graces(p, rect, 10.0 * tol)) {
      throw PegError(ErrorCode::NotConverged,
                     "refined rectangle does not grace the polygon");
    }
    return rect;
  }
  throw PegError(ErrorCode::EdgeAssignmentChanged,
                 "vertex kept crossing polygon vertices during refinement");
}

std::vector<LabeledRectangle> sample_all(const Polygon& p, int grid_n) {
  std::vector<LabeledRectangle> out;
  const int n = p.size();
  const int cells = grid_n * n;
  const double step = p.perimeter() / cells;
  const double coarse = 2.0 * step;  // one grid cell

  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      if (i == j) continue;
      const double s1 = (i + 0.5) * step;
      const double s2 = (j + 0.5) * step;
      for (const OracleHit& hit : shoot(p, s1, s2, coarse)) {
        try {
          LabeledRectangle r = newton_refine(p, hit);
          // Refinement basins can drain into the degenerate doubled-chord
          // families; those are not isolated rectangles of the manifold.
          if (std::min(r.X, r.Y) <= coarse) continue;
          out.push_back(r);
        } catch (const PegError&) {
          // Coarse hits that fail to polish are dropped.
        }
      }
    }
  }

  std::sort(out.begin(), out.end(),
            [](const LabeledRectangle& a, const LabeledRectangle& b) {
              for (int k = 0; k < 4; ++k) {
                if (a.v[static_cast<size_t>(k)].x != b.v[static_cast<size_t>(k)].x)
                  return a.v[static_cast<size_t>(k)].x < b.v[static_cast<size_t>(k)].x;
                if (a.v[static_cast<size_t>(k)].y != b.v[static_cast<size_t>(k)].y)
                  return a.v[static_cast<size_t>(k)].y < b.v[static_cast<size_t>(k)].y;
              }
              return false;
            });
  std::vector<LabeledRectangle> dedup;
  const double prox = 1e-6 * p.perimeter();
  for (const LabeledRectangle& r : out) {
    bool dup = false;
    for (auto it = dedup.rbegin(); it != dedup.rend(); ++it) {
      if (rect_distance(*it, r) <= prox) {
        dup = true;
        break;
      }
      if (r.v[0].x - it->v[0].x > prox) break;  // sorted by R1.x
    }
    if (!dup) dedup.push_back(r);
  }
  return dedup;
}

}  // namespace pegtrace
