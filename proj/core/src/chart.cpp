#include "pegtrace/chart.hpp"

#include <algorithm>
#include <cmath>

namespace pegtrace {

EdgeQuadruple EdgeQuadruple::from_polygon(const Polygon& p,
                                          const std::array<int, 4>& edges) {
  EdgeQuadruple q;
  for (int j = 0; j < 4; ++j) {
    const PolygonEdge& e = p.edges()[static_cast<size_t>(edges[static_cast<size_t>(j)])];
    q.seg[static_cast<size_t>(j)] =
        EdgeSegment{e.a, e.dir, e.len, edges[static_cast<size_t>(j)]};
  }
  return q;
}

Chart Chart::build(const EdgeQuadruple& quad) {
  Chart ch;
  ch.quad_ = quad;
  const EdgeSegment& e1 = quad.seg[0];
  const EdgeSegment& e2 = quad.seg[1];
  const EdgeSegment& e3 = quad.seg[2];
  const EdgeSegment& e4 = quad.seg[3];

  double lmax = 0.0;
  for (const EdgeSegment& e : quad.seg) lmax = std::max(lmax, e.len);
  ch.len_scale_ = 1.0 + lmax;
  ch.eps_alg_ = 1e-9 * ch.len_scale_ * ch.len_scale_;

  // Parallelogram closure onto L4, written in arclength parameters.
  const Vec2 asum = e1.anchor - e2.anchor + e3.anchor - e4.anchor;
  ch.c_[0] = cross(asum, e4.dir);
  ch.c_[1] = cross(e1.dir, e4.dir);
  ch.c_[2] = -cross(e2.dir, e4.dir);
  ch.c_[3] = cross(e3.dir, e4.dir);

  const double cmax =
      std::max({std::abs(ch.c_[1]), std::abs(ch.c_[2]), std::abs(ch.c_[3])});
  if (cmax <= 1e-9) {
    throw PegError(ErrorCode::AllParallelToL4,
                   "closure hyperplane is not a graph over any parameter");
  }
  ch.cnorm_ = std::sqrt(ch.c_[1] * ch.c_[1] + ch.c_[2] * ch.c_[2] +
                        ch.c_[3] * ch.c_[3]);

  // Right-angle quadric (p1 - p2) . (p3 - p2) as a symmetric form in
  // homogeneous coordinates (t1, t2, t3, 1).
  const Vec2 d12 = e1.anchor - e2.anchor;
  const Vec2 d32 = e3.anchor - e2.anchor;
  Mat4& m = ch.m_;
  m = {};
  m[1][1] = 1.0;
  m[0][2] = m[2][0] = 0.5 * dot(e1.dir, e3.dir);
  m[0][1] = m[1][0] = -0.5 * dot(e1.dir, e2.dir);
  m[1][2] = m[2][1] = -0.5 * dot(e2.dir, e3.dir);
  m[0][3] = m[3][0] = 0.5 * dot(e1.dir, d32);
  m[1][3] = m[3][1] = -0.5 * dot(e2.dir, d12 + d32);
  m[2][3] = m[3][2] = 0.5 * dot(e3.dir, d12);
  m[3][3] = dot(d12, d32);

  // Eliminate the best-conditioned parameter.
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(ch.c_[i + 1]) > std::abs(ch.c_[k + 1])) k = i;
  }
  ch.elim_ = k;
  int kp = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != k) ch.keep_[kp++] = i;
  }

  // Substitution (t1,t2,t3,1) = S (s1,s2,1), then A = S^T M S.
  double S[4][3] = {};
  S[ch.keep_[0]][0] = 1.0;
  S[ch.keep_[1]][1] = 1.0;
  S[k][0] = -ch.c_[ch.keep_[0] + 1] / ch.c_[k + 1];
  S[k][1] = -ch.c_[ch.keep_[1] + 1] / ch.c_[k + 1];
  S[k][2] = -ch.c_[0] / ch.c_[k + 1];
  S[3][2] = 1.0;

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) {
        for (int s = 0; s < 4; ++s) acc += S[r][i] * m[r][s] * S[s][j];
      }
      ch.reduced_[i][j] = acc;
    }
  }

  ch.analysis_ = analyze_conic(ch.reduced_);
  return ch;
}

double Chart::plane_value(const Vec3& t) const {
  return c_[0] + c_[1] * t[0] + c_[2] * t[1] + c_[3] * t[2];
}

double Chart::plane_residual(const Vec3& t) const {
  return std::abs(plane_value(t)) / cnorm_;
}

double Chart::quadric_value(const Vec3& t) const {
  const double x[4] = {t[0], t[1], t[2], 1.0};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) acc += x[i] * m_[i][j] * x[j];
  }
  return acc;
}

Vec3 Chart::quadric_gradient(const Vec3& t) const {
  const double x[4] = {t[0], t[1], t[2], 1.0};
  Vec3 g{};
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += m_[i][j] * x[j];
    g[static_cast<size_t>(i)] = 2.0 * acc;
  }
  return g;
}

double Chart::t4_of(const Vec3& t) const {
  const Vec2 p4 = quad_.seg[0].at(t[0]) - quad_.seg[1].at(t[1]) +
                  quad_.seg[2].at(t[2]) - quad_.seg[3].anchor;
  return dot(p4, quad_.seg[3].dir);
}

Vec2 Chart::reduce(const Vec3& t) const {
  return {t[static_cast<size_t>(keep_[0])], t[static_cast<size_t>(keep_[1])]};
}

Vec3 Chart::lift(const Vec2& s) const {
  Vec3 t{};
  t[static_cast<size_t>(keep_[0])] = s.x;
  t[static_cast<size_t>(keep_[1])] = s.y;
  t[static_cast<size_t>(elim_)] =
      -(c_[0] + c_[static_cast<size_t>(keep_[0]) + 1] * s.x +
        c_[static_cast<size_t>(keep_[1]) + 1] * s.y) /
      c_[static_cast<size_t>(elim_) + 1];
  return t;
}

LabeledRectangle Chart::rectangle_at(const Vec3& t) const {
  if (plane_residual(t) > eps_alg_ / len_scale_) {
    throw PegError(ErrorCode::OffHyperplane,
                   "parameters do not satisfy the closure hyperplane");
  }
  const Point r1 = quad_.seg[0].at(t[0]);
  const Point r2 = quad_.seg[1].at(t[1]);
  const Point r3 = quad_.seg[2].at(t[2]);
  return LabeledRectangle::from_vertices(r1, r2, r3, r1 - r2 + r3);
}

Vec3 Chart::tangent_at(const Vec3& t, const std::optional<Vec3>& prev) const {
  const Vec3 n{c_[1] / cnorm_, c_[2] / cnorm_, c_[3] / cnorm_};
  const Vec3 g = quadric_gradient(t);
  Vec3 tau = cross3(n, g);
  const double nt = norm3(tau);
  if (nt <= eps_alg_ / len_scale_) {
    throw PegError(ErrorCode::SingularPoint,
                   "projected quadric gradient vanishes (conic node)");
  }
  tau = tau * (1.0 / nt);
  if (prev && dot3(tau, *prev) < 0) tau = tau * -1.0;
  return tau;
}

bool Chart::in_box(const Vec3& t, double tol) const {
  for (int j = 0; j < 3; ++j) {
    if (t[static_cast<size_t>(j)] < -tol ||
        t[static_cast<size_t>(j)] > quad_.seg[static_cast<size_t>(j)].len + tol)
      return false;
  }
  const double t4 = t4_of(t);
  return t4 >= -tol && t4 <= quad_.seg[3].len + tol;
}

std::array<double, 8> Chart::wall_clearances(const Vec3& t) const {
  std::array<double, 8> w{};
  for (int j = 0; j < 3; ++j) {
    w[static_cast<size_t>(2 * j)] = t[static_cast<size_t>(j)];
    w[static_cast<size_t>(2 * j + 1)] =
        quad_.seg[static_cast<size_t>(j)].len - t[static_cast<size_t>(j)];
  }
  const double t4 = t4_of(t);
  w[6] = t4;
  w[7] = quad_.seg[3].len - t4;
  return w;
}

namespace {

double min_clearance(const Chart& ch, const Vec2& s) {
  const auto w = ch.wall_clearances(ch.lift(s));
  return *std::min_element(w.begin(), w.end());
}

// Distance bound from a branch origin that covers the kept-parameter box.
double cover_radius(const Chart& ch, const ConicBranch& br) {
  const auto idx0 = static_cast<size_t>(ch.eliminated_axis() == 0 ? 1 : 0);
  double l[2];
  int kp = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != ch.eliminated_axis()) l[kp++] = ch.quad().seg[static_cast<size_t>(i)].len;
  }
  (void)idx0;
  double r = 0.0;
  for (int cx = 0; cx < 2; ++cx) {
    for (int cy = 0; cy < 2; ++cy) {
      r = std::max(r, norm(Vec2{cx * l[0], cy * l[1]} - br.origin));
    }
  }
  return r + 1.0;
}

}  // namespace

std::vector<ChartComponent> chart_components(const Chart& chart, int quality) {
  if (chart.kind() == ConicKind::DegeneratePlane) {
    throw PegError(ErrorCode::DegenerateChart,
                   "plane-degenerate chart has no conic components");
  }
  std::vector<ChartComponent> out;
  const int n = std::max(quality, 64);
  // Small inward slack: solution pieces riding exactly on a wall (degenerate
  // chord lines) must not fragment on rounding noise.
  const double tol = -1e-12 * chart.len_scale();

  for (const ConicBranch& br : chart.branches()) {
    const auto [u0, u1] = br.window(cover_radius(chart, br));
    const double du = (u1 - u0) / n;
    std::vector<char> inside(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
      inside[static_cast<size_t>(i)] =
          min_clearance(chart, br.eval(u0 + i * du)) >= tol;
    }

    const bool wrap = br.periodic();
    if (wrap) {
      bool all = true;
      for (char c : inside) all = all && c;
      if (all) {
        ChartComponent comp;
        comp.closed = true;
        for (int i = 0; i < n; ++i) {
          const Vec3 t = chart.lift(br.eval(u0 + i * du));
          comp.pts.push_back(ChartPoint{t, chart.rectangle_at(t), true});
        }
        out.push_back(std::move(comp));
        continue;
      }
    }

    auto refine = [&](double ua, double ub) {
      // ua inside, ub outside (or vice versa): bisect the wall crossing.
      const bool a_in = min_clearance(chart, br.eval(ua)) >= tol;
      for (int it = 0; it < 60; ++it) {
        const double um = 0.5 * (ua + ub);
        if ((min_clearance(chart, br.eval(um)) >= tol) == a_in) {
          ua = um;
        } else {
          ub = um;
        }
        if (std::abs(ub - ua) < 1e-14 * std::max(1.0, std::abs(ua))) break;
      }
      return a_in ? ua : ub;  // last parameter still inside
    };

    // Maximal inside runs.
    int i = 0;
    const int total = wrap ? n : n + 1;
    auto at = [&](int idx) { return inside[static_cast<size_t>(((idx % total) + total) % total)]; };
    std::vector<std::pair<double, double>> runs;
    if (wrap) {
      // Rotate to start at an outside sample.
      int start = -1;
      for (int j2 = 0; j2 < total; ++j2) {
        if (!at(j2)) { start = j2; break; }
      }
      if (start < 0) start = 0;
      int j2 = start;
      while (j2 < start + total) {
        if (!at(j2)) { ++j2; continue; }
        int k = j2;
        while (k < start + total && at(k)) ++k;
        double ua = refine(u0 + j2 * du, u0 + (j2 - 1) * du);
        double ub = refine(u0 + (k - 1) * du, u0 + k * du);
        if (ub < ua) ub += (u1 - u0);
        runs.emplace_back(ua, ub);
        j2 = k;
      }
    } else {
      while (i <= n) {
        if (!inside[static_cast<size_t>(i)]) { ++i; continue; }
        int k = i;
        while (k <= n && inside[static_cast<size_t>(k)]) ++k;
        double ua = (i == 0) ? u0 : refine(u0 + i * du, u0 + (i - 1) * du);
        double ub = (k == n + 1) ? u1 : refine(u0 + (k - 1) * du, u0 + k * du);
        runs.emplace_back(ua, ub);
        i = k;
      }
    }

    for (auto [ua, ub] : runs) {
      if (!(ub > ua)) continue;
      ChartComponent comp;
      const int steps = std::max(16, static_cast<int>(std::ceil((ub - ua) / du)));
      for (int j2 = 0; j2 <= steps; ++j2) {
        const double u = ua + (ub - ua) * j2 / steps;
        const Vec3 t = chart.lift(br.eval(u));
        comp.pts.push_back(ChartPoint{t, chart.rectangle_at(t), true});
      }
      out.push_back(std::move(comp));
    }
  }

  if (out.size() > 64) {
    throw PegError(ErrorCode::DegenerateChart,
                   "component count exceeds the conic/box bound");
  }
  return out;
}

bool detect_degenerate(const Chart& chart) {
  if (chart.kind() == ConicKind::DegeneratePlane) return true;
  const double tol = 1e-7 * chart.len_scale();
  for (const ConicBranch& br : chart.branches()) {
    if (br.form != ConicBranch::Form::Line) continue;
    const double r = cover_radius(chart, br);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (double u : {-0.5 * r, 0.0, 0.5 * r}) {
      const LabeledRectangle rect = chart.rectangle_at(chart.lift(br.eval(u)));
      xmin = std::min(xmin, rect.X);
      xmax = std::max(xmax, rect.X);
      ymin = std::min(ymin, rect.Y);
      ymax = std::max(ymax, rect.Y);
    }
    if (xmax - xmin <= tol && ymax - ymin <= tol) return true;
  }
  return false;
}

}  // namespace pegtrace
