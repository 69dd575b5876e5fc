#include "pegtrace/shape_invariant.hpp"

#include <algorithm>
#include <cmath>

namespace pegtrace {

ShapeCurve shape_curve(const ArcComponent& arc) {
  ShapeCurve out;
  out.cls = arc.cls;
  out.pts.reserve(arc.samples.size());
  out.params.reserve(arc.samples.size());
  double scale = 0.0;
  for (const TraceSample& s : arc.samples) {
    out.pts.push_back({s.rect.X, s.rect.Y});
    out.params.push_back(s.arclen);
    scale = std::max({scale, s.rect.X, s.rect.Y});
  }
  if (arc.cls != ComponentClass::Loop && !out.pts.empty()) {
    // Snap the degenerate endpoints exactly onto the axes.
    const double snap = 1e-7 * (1.0 + scale);
    for (Vec2* z : {&out.pts.front(), &out.pts.back()}) {
      if (std::abs(z->x) <= snap) z->x = 0.0;
      if (std::abs(z->y) <= snap) z->y = 0.0;
    }
  }
  return out;
}

ShapeLoop shape_loop(const ShapeCurve& curve) {
  ShapeLoop out;
  if (curve.pts.size() < 2) {
    throw PegError(ErrorCode::ClassMismatch, "shape curve has too few points");
  }
  const Vec2 z0 = curve.pts.front();
  const Vec2 z1 = curve.pts.back();
  switch (curve.cls) {
    case ComponentClass::Hyperbolic: {
      const bool fwd = z0.x == 0.0 && z1.y == 0.0;
      const bool rev = z0.y == 0.0 && z1.x == 0.0;
      if (!fwd && !rev) {
        throw PegError(ErrorCode::ClassMismatch,
                       "hyperbolic endpoints must lie on different axes");
      }
      out.kind = Augmentation::ViaOrigin;
      out.chain.push_back({0.0, 0.0});
      out.chain.insert(out.chain.end(), curve.pts.begin(), curve.pts.end());
      return out;
    }
    case ComponentClass::NullX:
      if (z0.y != 0.0 || z1.y != 0.0) {
        throw PegError(ErrorCode::ClassMismatch,
                       "null-x endpoints must lie on the X axis");
      }
      out.kind = Augmentation::AlongAxis;
      out.chain = curve.pts;  // the implicit closing edge runs along the axis
      return out;
    case ComponentClass::NullY:
      if (z0.x != 0.0 || z1.x != 0.0) {
        throw PegError(ErrorCode::ClassMismatch,
                       "null-y endpoints must lie on the Y axis");
      }
      out.kind = Augmentation::AlongAxis;
      out.chain = curve.pts;
      return out;
    case ComponentClass::Loop:
      out.kind = Augmentation::None;
      out.chain = curve.pts;
      if (out.chain.size() > 1 &&
          norm(out.chain.front() - out.chain.back()) == 0.0) {
        out.chain.pop_back();
      }
      return out;
  }
  return out;
}

double omega_integral(std::span<const Vec2> chain) {
  const size_t n = chain.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = chain[i];
    const Vec2& b = chain[(i + 1) % n];
    acc += a.y * b.x - a.x * b.y;
  }
  return acc;
}

RegionAreas region_areas(const Polygon& p, const LabeledRectangle& r) {
  const double tol = std::max(1e-6 * p.perimeter(), 10 * p.eps_geo());
  std::array<double, 4> s{};
  for (int j = 0; j < 4; ++j) {
    const auto sj = p.try_boundary_param(r.v[static_cast<size_t>(j)], tol);
    if (!sj) {
      throw PegError(ErrorCode::NotGracing,
                     "rectangle vertex is not on the boundary");
    }
    s[static_cast<size_t>(j)] = *sj;
  }
  if (cyclic_winding(s, p.perimeter(), 1e-9 * p.perimeter()) > 1) {
    throw PegError(ErrorCode::NotGracing,
                   "rectangle labels run against the boundary order");
  }

  const double eps = 1e-12 * p.perimeter();
  RegionAreas out;
  for (int j = 0; j < 4; ++j) {
    const double sa = s[static_cast<size_t>(j)];
    const double sb = s[static_cast<size_t>((j + 1) % 4)];
    const double gap = p.wrap(sb - sa);
    if (gap <= eps || gap >= p.perimeter() - eps) {
      out.a[static_cast<size_t>(j)] = 0.0;  // empty boundary arc
      continue;
    }
    // Counterclockwise boundary arc R_j -> R_{j+1}, then the chord back.
    std::vector<Point> chain;
    chain.push_back(r.v[static_cast<size_t>(j)]);
    std::vector<std::pair<double, int>> between;
    for (int v = 0; v < p.size(); ++v) {
      const double dv = p.wrap(p.edges()[static_cast<size_t>(v)].s0 - sa);
      if (dv > eps && dv < gap - eps) between.emplace_back(dv, v);
    }
    std::sort(between.begin(), between.end());
    for (const auto& [dv, v] : between) {
      chain.push_back(p.vertices()[static_cast<size_t>(v)]);
    }
    chain.push_back(r.v[static_cast<size_t>((j + 1) % 4)]);
    out.a[static_cast<size_t>(j)] = signed_area(chain);
  }
  return out;
}

namespace {

double fit_derivative(double t0, double f0, double t1, double f1, double t2,
                      double f2) {
  return f0 * (t1 - t2) / ((t0 - t1) * (t0 - t2)) +
         f1 * (2 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
         f2 * (t1 - t0) / ((t2 - t0) * (t2 - t1));
}

}  // namespace

double check_differential(const Polygon& p, const ArcComponent& arc,
                          double spacing) {
  // Pick samples roughly `spacing` apart along the arc.
  std::vector<int> idx;
  double next = 0.0;
  for (int i = 0; i < static_cast<int>(arc.samples.size()); ++i) {
    if (arc.samples[static_cast<size_t>(i)].arclen >= next) {
      idx.push_back(i);
      next = arc.samples[static_cast<size_t>(i)].arclen + spacing;
    }
  }
  if (idx.size() < 3) return 0.0;

  std::vector<double> A(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    A[k] = region_areas(p, arc.samples[static_cast<size_t>(idx[k])].rect)
               .alternating();
  }

  double worst = 0.0;
  for (size_t k = 1; k + 1 < idx.size(); ++k) {
    const TraceSample& s0 = arc.samples[static_cast<size_t>(idx[k - 1])];
    const TraceSample& s1 = arc.samples[static_cast<size_t>(idx[k])];
    const TraceSample& s2 = arc.samples[static_cast<size_t>(idx[k + 1])];
    // The identity is smooth per chart; differentiating across a chart
    // boundary kink would poison the residual.
    if (s0.chart_id != s1.chart_id || s1.chart_id != s2.chart_id) continue;
    const double t0 = s0.arclen, t1 = s1.arclen, t2 = s2.arclen;
    const double dA = fit_derivative(t0, A[k - 1], t1, A[k], t2, A[k + 1]);
    const double dX =
        fit_derivative(t0, s0.rect.X, t1, s1.rect.X, t2, s2.rect.X);
    const double dY =
        fit_derivative(t0, s0.rect.Y, t1, s1.rect.Y, t2, s2.rect.Y);
    const double rhs = s1.rect.Y * dX - s1.rect.X * dY;
    worst = std::max(worst, std::abs(dA - rhs));
  }
  return worst;
}

SweepReport verify_sweep(const Polygon& p, const ArcComponent& arc,
                         const TraceConfig& cfg) {
  SweepReport rep;
  rep.cls = arc.cls;
  const ShapeLoop loop = shape_loop(shape_curve(arc));
  rep.loop_area = signed_area(loop.chain);
  const double h_max = cfg.h_max_rel * p.perimeter();
  rep.tolerance = std::max(1e-6 * p.area(), 25.0 * h_max * h_max);
  if (arc.cls == ComponentClass::Hyperbolic) {
    rep.target = p.area();
    rep.residual = std::abs(std::abs(rep.loop_area) - p.area());
  } else {
    rep.target = 0.0;
    rep.residual = std::abs(rep.loop_area);
  }
  rep.pass = rep.residual <= rep.tolerance;
  return rep;
}

}  // namespace pegtrace
