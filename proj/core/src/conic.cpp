#include <algorithm>
#include <cmath>

#include "pegtrace/chart.hpp"

namespace pegtrace {

const char* conic_kind_name(ConicKind k) {
  switch (k) {
    case ConicKind::Ellipse: return "Ellipse";
    case ConicKind::Hyperbola: return "Hyperbola";
    case ConicKind::Parabola: return "Parabola";
    case ConicKind::CrossingLines: return "CrossingLines";
    case ConicKind::ParallelLines: return "ParallelLines";
    case ConicKind::SingleLine: return "SingleLine";
    case ConicKind::DoubleLine: return "DoubleLine";
    case ConicKind::IsolatedPoint: return "IsolatedPoint";
    case ConicKind::Empty: return "Empty";
    case ConicKind::DegeneratePlane: return "DegeneratePlane";
  }
  return "?";
}

Vec2 ConicBranch::eval(double u) const {
  switch (form) {
    case Form::Ellipse:
      return origin + ax1 * (a * std::cos(u)) + ax2 * (b * std::sin(u));
    case Form::HyperbolaArm:
      return origin + ax1 * (arm * a * std::cosh(u)) + ax2 * (b * std::sinh(u));
    case Form::Parabola:
      return origin + ax1 * u + ax2 * (a * u * u);
    case Form::Line:
      return origin + ax1 * u;
  }
  return origin;
}

Vec2 ConicBranch::deriv(double u) const {
  switch (form) {
    case Form::Ellipse:
      return ax1 * (-a * std::sin(u)) + ax2 * (b * std::cos(u));
    case Form::HyperbolaArm:
      return ax1 * (arm * a * std::sinh(u)) + ax2 * (b * std::cosh(u));
    case Form::Parabola:
      return ax1 + ax2 * (2.0 * a * u);
    case Form::Line:
      return ax1;
  }
  return ax1;
}

std::pair<double, double> ConicBranch::window(double R) const {
  switch (form) {
    case Form::Ellipse:
      return {0.0, 2.0 * M_PI};
    case Form::HyperbolaArm: {
      const double reach = std::max(R / std::max(a, 1e-300), 1.0);
      const double s = std::acosh(reach) + 0.5;
      return {-s, s};
    }
    case Form::Parabola: {
      // |u| <= R already covers |ax1 component| <= R.
      return {-R, R};
    }
    case Form::Line:
      return {-R, R};
  }
  return {-R, R};
}

namespace {

struct Eigen2 {
  double l1 = 0.0, l2 = 0.0;  // |l1| >= |l2|
  Vec2 v1, v2;                // unit eigenvectors
};

Eigen2 eigen_sym2(double a, double b, double c) {
  // Matrix [[a, b], [b, c]].
  Eigen2 e;
  const double tr = a + c;
  const double det = a * c - b * b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  double l1 = tr / 2.0 + disc;
  double l2 = tr / 2.0 - disc;
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  e.l1 = l1;
  e.l2 = l2;
  // Eigenvector for l1.
  Vec2 v{b, l1 - a};
  if (norm(v) < 1e-14 * (std::abs(a) + std::abs(b) + std::abs(c) + 1e-300)) {
    v = (std::abs(a - l1) <= std::abs(c - l1)) ? Vec2{1, 0} : Vec2{0, 1};
    if (std::abs(b) > 0) v = Vec2{l1 - c, b};
    if (norm(v) == 0) v = Vec2{1, 0};
  }
  e.v1 = normalized(v);
  e.v2 = perp(e.v1);
  e.l2 = dot(e.v2, Vec2{a * e.v2.x + b * e.v2.y, b * e.v2.x + c * e.v2.y});
  return e;
}

ConicBranch make_line(const Vec2& p, const Vec2& d) {
  ConicBranch br;
  br.form = ConicBranch::Form::Line;
  br.origin = p;
  br.ax1 = normalized(d);
  br.ax2 = perp(br.ax1);
  return br;
}

}  // namespace

ConicAnalysis analyze_conic(const Mat3& A, double eps_rel) {
  ConicAnalysis out;

  double norma = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) norma = std::max(norma, std::abs(A[i][j]));
  if (norma == 0.0) {
    out.kind = ConicKind::DegeneratePlane;
    return out;
  }
  const double eps = eps_rel;

  // Normalized coefficients: q(x) = xT B x + 2 bT x + f.
  const double a = A[0][0] / norma, b12 = A[0][1] / norma, c = A[1][1] / norma;
  const Vec2 bv{A[0][2] / norma, A[1][2] / norma};
  const double f = A[2][2] / norma;

  const double bmax = std::max({std::abs(a), std::abs(b12), std::abs(c)});

  if (bmax <= eps) {
    // No quadratic part.
    if (norm(bv) <= eps) {
      out.kind = ConicKind::DegeneratePlane;  // constant; zero handled above
      return out;
    }
    out.kind = ConicKind::SingleLine;
    const Vec2 p = bv * (-f / (2.0 * norm2(bv)));
    out.branches.push_back(make_line(p, perp(bv)));
    return out;
  }

  const Eigen2 eg = eigen_sym2(a, b12, c);

  if (std::abs(eg.l2) > eps) {
    // Full-rank quadratic part: central conic.
    const double det = eg.l1 * eg.l2;
    // Center: B m = -b.
    const double inv_det = 1.0 / (a * c - b12 * b12);
    const Vec2 m{(-bv.x * c + bv.y * b12) * inv_det,
                 (-bv.y * a + bv.x * b12) * inv_det};
    const double gamma = f + dot(bv, m);
    const double gscale = std::max(1.0, std::abs(dot(bv, m)));

    if (det > 0) {
      if (std::abs(gamma) <= eps * gscale) {
        out.kind = ConicKind::IsolatedPoint;
        return out;
      }
      if ((gamma > 0) == (eg.l1 > 0)) {
        out.kind = ConicKind::Empty;
        return out;
      }
      out.kind = ConicKind::Ellipse;
      ConicBranch br;
      br.form = ConicBranch::Form::Ellipse;
      br.origin = m;
      br.ax1 = eg.v1;
      br.ax2 = eg.v2;
      br.a = std::sqrt(-gamma / eg.l1);
      br.b = std::sqrt(-gamma / eg.l2);
      out.branches.push_back(br);
      return out;
    }

    // det < 0: hyperbola or crossing lines.
    if (std::abs(gamma) <= eps * gscale) {
      out.kind = ConicKind::CrossingLines;
      out.node = m;
      const double r = std::sqrt(-eg.l2 / eg.l1);
      out.branches.push_back(make_line(m, eg.v1 * r + eg.v2));
      out.branches.push_back(make_line(m, eg.v1 * -r + eg.v2));
      return out;
    }
    out.kind = ConicKind::Hyperbola;
    // Real axis: eigendirection whose eigenvalue opposes gamma's sign.
    const bool first_real = (eg.l1 > 0) != (gamma > 0);
    const double lr = first_real ? eg.l1 : eg.l2;
    const double li = first_real ? eg.l2 : eg.l1;
    const Vec2 vr = first_real ? eg.v1 : eg.v2;
    const Vec2 vi = first_real ? eg.v2 : eg.v1;
    for (int arm : {+1, -1}) {
      ConicBranch br;
      br.form = ConicBranch::Form::HyperbolaArm;
      br.origin = m;
      br.ax1 = vr;
      br.ax2 = vi;
      br.a = std::sqrt(-gamma / lr);
      br.b = std::sqrt(gamma / li);
      br.arm = arm;
      out.branches.push_back(br);
    }
    return out;
  }

  // Rank-one quadratic part: parabola or line pairs.
  const double l1 = eg.l1;
  const Vec2 v1 = eg.v1, v2 = eg.v2;
  const double b1 = dot(bv, v1);
  const double b2 = dot(bv, v2);

  if (std::abs(b2) > eps) {
    out.kind = ConicKind::Parabola;
    const double xi0 = -b1 / l1;
    const double eta0 = -(f + l1 * xi0 * xi0 + 2.0 * b1 * xi0) / (2.0 * b2);
    ConicBranch br;
    br.form = ConicBranch::Form::Parabola;
    br.origin = v1 * xi0 + v2 * eta0;
    br.ax1 = v1;
    br.ax2 = v2;
    br.a = -l1 / (2.0 * b2);
    out.branches.push_back(br);
    return out;
  }

  // l1 xi^2 + 2 b1 xi + f = 0 along v1; lines run along v2.
  const double disc = b1 * b1 - l1 * f;
  const double dscale = std::max(1.0, std::abs(b1 * b1) + std::abs(l1 * f));
  if (disc > eps * dscale) {
    out.kind = ConicKind::ParallelLines;
    const double root = std::sqrt(disc);
    for (double xi : {(-b1 + root) / l1, (-b1 - root) / l1}) {
      out.branches.push_back(make_line(v1 * xi, v2));
    }
    return out;
  }
  if (disc < -eps * dscale) {
    out.kind = ConicKind::Empty;
    return out;
  }
  out.kind = ConicKind::DoubleLine;
  out.branches.push_back(make_line(v1 * (-b1 / l1), v2));
  return out;
}

}  // namespace pegtrace
