#ifndef PEGTRACE_CHART_HPP
#define PEGTRACE_CHART_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "pegtrace/geometry.hpp"
#include "pegtrace/linalg.hpp"

namespace pegtrace {

struct EdgeSegment {
  Point anchor;
  Vec2 dir;       // unit
  double len = 0.0;
  int edge_index = -1;  // index into the source polygon's edge list, if any

  Point at(double t) const { return anchor + dir * t; }
};

struct EdgeQuadruple {
  std::array<EdgeSegment, 4> seg{};

  static EdgeQuadruple from_polygon(const Polygon& p,
                                    const std::array<int, 4>& edges);

  std::array<int, 4> indices() const {
    return {seg[0].edge_index, seg[1].edge_index, seg[2].edge_index,
            seg[3].edge_index};
  }
  bool operator==(const EdgeQuadruple& o) const {
    return indices() == o.indices();
  }
};

enum class ConicKind {
  Ellipse,
  Hyperbola,
  Parabola,
  CrossingLines,
  ParallelLines,
  SingleLine,
  DoubleLine,
  IsolatedPoint,
  Empty,
  DegeneratePlane,
};

const char* conic_kind_name(ConicKind k);

// One real parametrized branch of a conic in the reduced (s1,s2) plane.
struct ConicBranch {
  enum class Form { Ellipse, HyperbolaArm, Parabola, Line };
  Form form = Form::Line;
  Vec2 origin;       // center, vertex or line anchor
  Vec2 ax1, ax2;     // unit frame
  double a = 0.0;    // semi-axis / parabola coefficient
  double b = 0.0;
  int arm = +1;      // hyperbola arm sign

  Vec2 eval(double u) const;
  Vec2 deriv(double u) const;
  bool periodic() const { return form == Form::Ellipse; }
  // Parameter window whose points stay within distance R of origin.
  std::pair<double, double> window(double R) const;
};

struct ConicAnalysis {
  ConicKind kind = ConicKind::Empty;
  std::vector<ConicBranch> branches;
  std::optional<Vec2> node;  // crossing-lines node
};

// Classifies the conic xT A x = 0 (homogeneous coordinates (s1, s2, 1)).
// Coefficients are treated as zero below eps_rel times the matrix max-norm.
ConicAnalysis analyze_conic(const Mat3& A, double eps_rel = 1e-9);

struct ChartPoint {
  Vec3 t{};  // (t1, t2, t3) arclength parameters on L1, L2, L3
  LabeledRectangle rect;
  bool in_box = true;
};

// Algebraic model of the rectangles gracing one ordered segment quadruple:
// the parallelogram-closure hyperplane, the right-angle quadric, their conic
// intersection reduced to two parameters, and the product box of the four
// segments.
class Chart {
 public:
  // Throws AllParallelToL4 when the hyperplane is not a graph over any t_k.
  static Chart build(const EdgeQuadruple& quad);

  const EdgeQuadruple& quad() const { return quad_; }
  // Linear coefficients (c0, c1, c2, c3) of c1 t1 + c2 t2 + c3 t3 + c0 = 0.
  const std::array<double, 4>& plane_coeffs() const { return c_; }
  const Mat4& quadric_matrix() const { return m_; }
  const Mat3& reduced_matrix() const { return reduced_; }
  int eliminated_axis() const { return elim_; }  // 0-based index into (t1,t2,t3)
  ConicKind kind() const { return analysis_.kind; }
  const std::vector<ConicBranch>& branches() const { return analysis_.branches; }
  std::optional<Vec2> node() const { return analysis_.node; }
  double eps_alg() const { return eps_alg_; }
  double len_scale() const { return len_scale_; }

  double plane_value(const Vec3& t) const;
  double plane_residual(const Vec3& t) const;  // in length units
  double quadric_value(const Vec3& t) const;
  Vec3 quadric_gradient(const Vec3& t) const;
  double t4_of(const Vec3& t) const;

  Vec2 reduce(const Vec3& t) const;
  Vec3 lift(const Vec2& s) const;

  // Rectangle construction from chart parameters; closure is exact by
  // construction. Throws OffHyperplane when t violates the plane.
  LabeledRectangle rectangle_at(const Vec3& t) const;

  // Unit direction spanning the curve's tangent at t, oriented to extend
  // prev when given. Throws SingularPoint at conic nodes.
  Vec3 tangent_at(const Vec3& t, const std::optional<Vec3>& prev = {}) const;

  bool in_box(const Vec3& t, double tol) const;
  // Signed clearances (value - lower, upper - value) for the 8 box walls,
  // ordered (t1, t2, t3, t4) x (low, high).
  std::array<double, 8> wall_clearances(const Vec3& t) const;

 private:
  EdgeQuadruple quad_;
  std::array<double, 4> c_{};
  double cnorm_ = 1.0;  // |(c1,c2,c3)|
  Mat4 m_{};
  Mat3 reduced_{};
  int elim_ = 0;
  int keep_[2] = {1, 2};
  ConicAnalysis analysis_;
  double eps_alg_ = 0.0;
  double len_scale_ = 1.0;
};

struct ChartComponent {
  std::vector<ChartPoint> pts;
  bool closed = false;
};

// In-box solution arcs of the chart's conic, each an ordered sample chain.
// quality controls the parametric sampling resolution.
// Throws DegenerateChart for plane-degenerate charts.
std::vector<ChartComponent> chart_components(const Chart& chart, int quality);

// True when the chart carries an isometric continuum: the whole plane
// degenerates, or a line branch along which the side lengths are constant.
bool detect_degenerate(const Chart& chart);

}  // namespace pegtrace

#endif
