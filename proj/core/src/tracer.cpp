#include "pegtrace/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>

#include "pegtrace/oracle.hpp"

namespace pegtrace {

const char* component_class_name(ComponentClass c) {
  switch (c) {
    case ComponentClass::Hyperbolic: return "hyperbolic";
    case ComponentClass::NullX: return "null-x";
    case ComponentClass::NullY: return "null-y";
    case ComponentClass::Loop: return "loop";
  }
  return "?";
}

namespace {

Vec3 normalize3(const Vec3& v) {
  const double n = norm3(v);
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Rectangle-space velocity of the four vertices for a unit chart direction.
std::array<Vec2, 4> velocity8(const EdgeQuadruple& q, const Vec3& tau) {
  const Vec2 d1 = q.seg[0].dir * tau[0];
  const Vec2 d2 = q.seg[1].dir * tau[1];
  const Vec2 d3 = q.seg[2].dir * tau[2];
  return {d1, d2, d3, d1 - d2 + d3};
}

double dot8(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) acc += dot(a[static_cast<size_t>(i)], b[static_cast<size_t>(i)]);
  return acc;
}

double rect_speed(const EdgeQuadruple& q, const Vec3& tau) {
  const auto v = velocity8(q, tau);
  double acc = 0.0;
  for (const Vec2& d : v) acc += norm2(d);
  return std::sqrt(acc);
}

double rect_step_norm(const LabeledRectangle& a, const LabeledRectangle& b) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    acc += norm2(a.v[static_cast<size_t>(i)] - b.v[static_cast<size_t>(i)]);
  return std::sqrt(acc);
}

// Projects a point back onto the chart's curve (plane + quadric) by damped
// Gauss-Newton, moving minimally.
std::optional<Vec3> correct(const Chart& ch, Vec3 t, double tol_len) {
  const double tol_q = tol_len * ch.len_scale();
  double prev = 1e300;
  for (int it = 0; it < 20; ++it) {
    const double fp = ch.plane_value(t);
    const double fq = ch.quadric_value(t);
    const double res = std::abs(fp) + std::abs(fq) / ch.len_scale();
    if (std::abs(fp) <= tol_len && std::abs(fq) <= tol_q) return t;
    if (res >= prev * 0.9999 && it > 6) return std::nullopt;
    prev = res;

    const auto& c = ch.plane_coeffs();
    const Vec3 n{c[1], c[2], c[3]};
    const Vec3 g = ch.quadric_gradient(t);
    const double a11 = dot3(n, n);
    const double a12 = dot3(n, g);
    const double a22 = dot3(g, g);
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-300)) return std::nullopt;
    const double y1 = (-fp * a22 + fq * a12) / det;
    const double y2 = (-fq * a11 + fp * a12) / det;
    const Vec3 step{n[0] * y1 + g[0] * y2, n[1] * y1 + g[1] * y2,
                    n[2] * y1 + g[2] * y2};
    double scale = 1.0;
    for (int damp = 0; damp < 8; ++damp) {
      const Vec3 trial = t + step * scale;
      const double rp = std::abs(ch.plane_value(trial));
      const double rq = std::abs(ch.quadric_value(trial));
      if (rp + rq / ch.len_scale() < res || damp == 7) {
        t = trial;
        break;
      }
      scale *= 0.5;
    }
  }
  const double fp = ch.plane_value(t);
  const double fq = ch.quadric_value(t);
  if (std::abs(fp) <= tol_len && std::abs(fq) <= tol_q) return t;
  return std::nullopt;
}

// Lifted direction of a reduced-plane branch direction.
Vec3 lift_direction(const Chart& ch, const Vec2& d2) {
  int keep[2];
  int kp = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != ch.eliminated_axis()) keep[kp++] = i;
  }
  const auto& c = ch.plane_coeffs();
  Vec3 d{};
  d[static_cast<size_t>(keep[0])] = d2.x;
  d[static_cast<size_t>(keep[1])] = d2.y;
  d[static_cast<size_t>(ch.eliminated_axis())] =
      -(c[static_cast<size_t>(keep[0]) + 1] * d2.x +
        c[static_cast<size_t>(keep[1]) + 1] * d2.y) /
      c[static_cast<size_t>(ch.eliminated_axis()) + 1];
  return normalize3(d);
}

// Tangent with a crossing-lines fallback: exactly at a node the quadric
// gradient vanishes, but the incoming line branch direction is exact.
Vec3 tangent_or_branch(const Chart& ch, const Vec3& t, const Vec3& dir) {
  try {
    return ch.tangent_at(t, dir);
  } catch (const PegError& e) {
    if (e.code() != ErrorCode::SingularPoint) throw;
    double best = -2.0;
    Vec3 pick = dir;
    for (const ConicBranch& br : ch.branches()) {
      if (br.form != ConicBranch::Form::Line) continue;
      for (double sgn : {1.0, -1.0}) {
        const Vec3 cand = lift_direction(ch, br.ax1 * sgn);
        const double al = dot3(cand, dir);
        if (al > best) {
          best = al;
          pick = cand;
        }
      }
    }
    if (best < 0.5) throw;
    return pick;
  }
}

std::array<double, 4> boundary_params_of(const Polygon& p,
                                         const EdgeQuadruple& q,
                                         const Vec3& t, double t4) {
  std::array<double, 4> s{};
  for (int j = 0; j < 4; ++j) {
    const double tj = j < 3 ? t[static_cast<size_t>(j)] : t4;
    s[static_cast<size_t>(j)] =
        p.wrap(p.edges()[static_cast<size_t>(q.seg[static_cast<size_t>(j)].edge_index)].s0 + tj);
  }
  return s;
}

struct Stepper {
  const Polygon& p;
  const TraceConfig::Abs& cfg;
  EdgeQuadruple quad;
  Chart chart;
  Vec3 t;
  Vec3 dir;
  double h;
  int clean = 0;
  bool non_generic = false;

  Stepper(const Polygon& p_, const TraceConfig::Abs& cfg_, const SeedStart& s)
      : p(p_), cfg(cfg_), quad(s.quad), chart(Chart::build(s.quad)), t(s.t),
        dir(s.dir), h(cfg_.h0) {}

  enum class Outcome { Advanced, WallEvent };
  struct StepInfo {
    Outcome outcome;
    int slot = -1;
    int side = -1;
  };

  double min_clearance(const Vec3& tt) const {
    const auto w = chart.wall_clearances(tt);
    return *std::min_element(w.begin(), w.end());
  }

  // One adaptive predictor-corrector step; t advances to either an interior
  // curve point or a located wall event.
  StepInfo advance() {
    const Vec3 tau = tangent_or_branch(chart, t, dir);
    const double gamma = rect_speed(quad, tau);

    for (int attempt = 0; attempt < 40; ++attempt) {
      const double dt = h / gamma;
      const auto corrected = correct(chart, t + tau * dt, cfg.corrector_tol);
      bool ok = corrected.has_value();
      Vec3 tn{};
      if (ok) {
        tn = *corrected;
        const Vec3 delta = tn - t;
        if (dot3(delta, tau) <= 0.25 * dt) ok = false;  // corrector slid back
      }
      if (!ok) {
        h *= 0.5;
        clean = 0;
        if (h < 1e-7 * cfg.h0) {
          throw PegError(ErrorCode::CorrectorDivergence,
                         "continuation step underflow");
        }
        continue;
      }

      const double wmin = min_clearance(tn);
      if (wmin >= -cfg.wall_tol) {
        dir = normalize3(tn - t);
        t = tn;
        if (++clean >= 4) {
          h = std::min(h * 1.5, cfg.h_max);
          clean = 0;
        }
        return {Outcome::Advanced, -1, -1};
      }

      // Wall event: bisect the step fraction to the crossing.
      double lo = 0.0, hi = 1.0;
      Vec3 t_in = t;
      Vec3 t_out = tn;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto tm = correct(chart, t + tau * (mid * dt), cfg.corrector_tol);
        if (!tm) {
          hi = mid;
          continue;
        }
        const double w = min_clearance(*tm);
        if (w >= 0) {
          lo = mid;
          t_in = *tm;
          if (w <= cfg.wall_tol) break;
        } else {
          hi = mid;
          t_out = *tm;
        }
      }
      const auto wo = chart.wall_clearances(t_out);
      const int wall = static_cast<int>(
          std::min_element(wo.begin(), wo.end()) - wo.begin());
      dir = tau;
      t = t_in;
      return {Outcome::WallEvent, wall / 2, wall % 2};
    }
    throw PegError(ErrorCode::CorrectorDivergence, "step size stuck");
  }

  // Re-anchor on a neighbor chart after a rectangle vertex crossed a polygon
  // vertex. Returns false when the new chart has no in-box continuation.
  //
  // Orientation across the kink cannot rely on velocity alignment: the curve
  // may bend sharply while one vertex swings around the polygon vertex. The
  // already-traced side lies outside the new box, so the inward direction is
  // the continuation whenever one exists.
  bool transition(int slot, int side) {
    const LabeledRectangle rect = chart.rectangle_at(t);

    EdgeQuadruple nq = chart_transition(p, quad, slot, side);
    Chart nchart = [&] { return Chart::build(nq); }();
    if (nchart.kind() == ConicKind::DegeneratePlane) return false;

    Vec3 nt{};
    for (int j = 0; j < 3; ++j) {
      const EdgeSegment& e = nq.seg[static_cast<size_t>(j)];
      nt[static_cast<size_t>(j)] = dot(rect.v[static_cast<size_t>(j)] - e.anchor, e.dir);
    }
    const auto polished = correct(nchart, nt, cfg.corrector_tol);
    if (!polished) return false;
    nt = *polished;
    if (!nchart.in_box(nt, 64.0 * cfg.wall_tol)) return false;

    std::vector<Vec3> bases;
    try {
      bases.push_back(nchart.tangent_at(nt));
    } catch (const PegError& e) {
      if (e.code() != ErrorCode::SingularPoint) throw;
      for (const ConicBranch& br : nchart.branches()) {
        if (br.form == ConicBranch::Form::Line) {
          bases.push_back(lift_direction(nchart, br.ax1));
        }
      }
      if (bases.empty()) return false;
    }

    // The handed-off point sits on the wall the arc just crossed; the slot
    // coordinate must move off it (side 0: entered at the end of the
    // previous edge, decreasing; side 1: entered at the start of the next
    // edge, increasing). Candidates pointing inward are tried first, and a
    // probe step settles ambiguous (wall-parallel) tangents.
    const double inward = side == 0 ? -1.0 : 1.0;
    std::vector<Vec3> cands;
    for (const Vec3& base : bases) {
      for (double sgn : {1.0, -1.0}) {
        const Vec3 tau = base * sgn;
        if (tau[static_cast<size_t>(slot)] * inward >= 0) {
          cands.insert(cands.begin(), tau);
        } else {
          cands.push_back(tau);
        }
      }
    }
    for (const Vec3& ntau : cands) {
      const double gamma = rect_speed(nq, ntau);
      const auto probe = correct(nchart, nt + ntau * (0.25 * cfg.h0 / gamma),
                                 cfg.corrector_tol);
      if (!probe) continue;
      const auto wp = nchart.wall_clearances(*probe);
      if (*std::min_element(wp.begin(), wp.end()) < -cfg.wall_tol) continue;
      quad = nq;
      chart = std::move(nchart);
      t = nt;
      dir = ntau;
      return true;
    }
    return false;
  }

  // Tangential contact: stay in the current chart and step past the graze.
  bool graze_past() {
    const Vec3 tau = tangent_or_branch(chart, t, dir);
    const double gamma = rect_speed(quad, tau);
    for (double frac : {0.5, 1.0, 2.0}) {
      const auto tn =
          correct(chart, t + tau * (frac * cfg.h0 / gamma), cfg.corrector_tol);
      if (!tn) continue;
      if (min_clearance(*tn) >= -cfg.wall_tol) {
        dir = normalize3(*tn - t);
        t = *tn;
        return true;
      }
    }
    return false;
  }
};

int quad_repeat_count(const std::vector<EdgeQuadruple>& seq) {
  std::map<std::array<int, 4>, int> counts;
  int worst = 0;
  for (const EdgeQuadruple& q : seq) {
    worst = std::max(worst, ++counts[q.indices()]);
  }
  return worst;
}

// Rebuilds run-length chart bookkeeping after reordering samples.
void rebuild_inscribing(ArcComponent& c,
                        const std::vector<EdgeQuadruple>& per_sample) {
  c.inscribing.clear();
  for (size_t i = 0; i < c.samples.size(); ++i) {
    if (c.inscribing.empty() || !(c.inscribing.back() == per_sample[i])) {
      c.inscribing.push_back(per_sample[i]);
    }
    c.samples[i].chart_id = static_cast<int>(c.inscribing.size()) - 1;
  }
}

void recompute_arclen(ArcComponent& c) {
  double acc = 0.0;
  for (size_t i = 0; i < c.samples.size(); ++i) {
    if (i > 0) acc += rect_step_norm(c.samples[i - 1].rect, c.samples[i].rect);
    c.samples[i].arclen = acc;
  }
}

std::vector<EdgeQuadruple> per_sample_quads(const ArcComponent& c) {
  std::vector<EdgeQuadruple> out;
  out.reserve(c.samples.size());
  for (const TraceSample& s : c.samples) {
    out.push_back(c.inscribing[static_cast<size_t>(s.chart_id)]);
  }
  return out;
}

void canonicalize(ArcComponent& c, const Polygon& p) {
  if (c.samples.size() < 2) return;
  if (c.cls == ComponentClass::Loop) {
    // Start at the lexicographic (X, Y) minimum, deterministic direction.
    auto quads = per_sample_quads(c);
    // Last sample duplicates the first; rotate the open chain.
    c.samples.pop_back();
    quads.pop_back();
    size_t m = 0;
    for (size_t i = 1; i < c.samples.size(); ++i) {
      const auto& a = c.samples[i].rect;
      const auto& b = c.samples[m].rect;
      if (a.X < b.X || (a.X == b.X && a.Y < b.Y)) m = i;
    }
    std::rotate(c.samples.begin(), c.samples.begin() + static_cast<long>(m),
                c.samples.end());
    std::rotate(quads.begin(), quads.begin() + static_cast<long>(m),
                quads.end());
    const auto& nxt = c.samples[1].rect;
    const auto& prv = c.samples.back().rect;
    if (nxt.X > prv.X || (nxt.X == prv.X && nxt.Y > prv.Y)) {
      std::reverse(c.samples.begin() + 1, c.samples.end());
      std::reverse(quads.begin() + 1, quads.end());
    }
    c.samples.push_back(c.samples.front());
    quads.push_back(quads.front());
    rebuild_inscribing(c, quads);
    recompute_arclen(c);
    return;
  }
  const double s_first = p.wrap(p.boundary_param(c.samples.front().rect[0]));
  const double s_last = p.wrap(p.boundary_param(c.samples.back().rect[0]));
  if (s_first > s_last + 1e-12 * p.perimeter()) {
    auto quads = per_sample_quads(c);
    std::reverse(c.samples.begin(), c.samples.end());
    std::reverse(quads.begin(), quads.end());
    std::swap(c.end0, c.end1);
    if (c.end0) c.shift = c.end0->shift;
    rebuild_inscribing(c, quads);
    recompute_arclen(c);
  }
}

// Spatial index over samples keyed by side lengths; rectangles close in
// vertex distance are close in (X, Y).
struct RectIndex {
  double cell;
  std::unordered_map<int64_t, std::vector<std::pair<int, int>>> buckets;

  explicit RectIndex(double cell_size) : cell(cell_size) {}

  static int64_t key(int ix, int iy) {
    return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
  }
  void add(int comp, int idx, double X, double Y) {
    buckets[key(static_cast<int>(std::floor(X / cell)),
                static_cast<int>(std::floor(Y / cell)))]
        .emplace_back(comp, idx);
  }
  // Visits candidates ring by ring (own bucket first); stops early when the
  // callback returns true.
  template <typename F>
  void for_near(double X, double Y, int radius, F&& f) const {
    const int cx = static_cast<int>(std::floor(X / cell));
    const int cy = static_cast<int>(std::floor(Y / cell));
    for (int ring = 0; ring <= radius; ++ring) {
      bool stop = false;
      for (int ix = cx - ring; ix <= cx + ring; ++ix) {
        for (int iy = cy - ring; iy <= cy + ring; ++iy) {
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
          const auto it = buckets.find(key(ix, iy));
          if (it == buckets.end()) continue;
          for (const auto& [comp, idx] : it->second) {
            if (f(comp, idx)) stop = true;
          }
        }
      }
      if (stop) return;
    }
  }
};

}  // namespace

std::array<LabeledRectangle, 4> seed_rectangles(const Diameter& d) {
  const LabeledRectangle base =
      LabeledRectangle::from_vertices(d.q1.p, d.q1.p, d.q2.p, d.q2.p);
  return {base, shifted(base, 1), shifted(base, 2), shifted(base, 3)};
}

std::vector<SeedStart> initial_chart(const Polygon& p,
                                     const LabeledRectangle& seed,
                                     const TraceConfig::Abs& cfg) {
  const double tol = 10.0 * p.eps_geo();
  std::array<std::vector<std::pair<int, double>>, 4> cand;  // (edge, t)
  for (int j = 0; j < 4; ++j) {
    const Point& v = seed.v[static_cast<size_t>(j)];
    for (int e = 0; e < p.size(); ++e) {
      const PolygonEdge& edge = p.edges()[static_cast<size_t>(e)];
      const double tj = std::clamp(dot(v - edge.a, edge.dir), 0.0, edge.len);
      if (distance(v, edge.a + edge.dir * tj) <= tol) {
        cand[static_cast<size_t>(j)].emplace_back(e, tj);
      }
    }
    if (cand[static_cast<size_t>(j)].empty()) {
      throw PegError(ErrorCode::NoViableChart,
                     "seed vertex is not on the boundary");
    }
  }

  const bool deg_x = seed.X <= cfg.eps_deg;
  std::vector<SeedStart> out;

  for (const auto& [e1, t1] : cand[0]) {
    for (const auto& [e2, t2] : cand[1]) {
      for (const auto& [e3, t3] : cand[2]) {
        for (const auto& [e4, t4] : cand[3]) {
          EdgeQuadruple quad = EdgeQuadruple::from_polygon(p, {e1, e2, e3, e4});
          Chart chart = [&]() -> Chart {
            try {
              return Chart::build(quad);
            } catch (const PegError&) {
              return Chart{};
            }
          }();
          if (chart.quad().seg[0].len <= 0) continue;  // build failed
          if (chart.kind() == ConicKind::DegeneratePlane) continue;
          const Vec3 t0{t1, t2, t3};
          if (chart.plane_residual(t0) > 1e2 * cfg.corrector_tol) continue;
          if (std::abs(chart.quadric_value(t0)) > 1e3 * chart.eps_alg())
            continue;
          if (std::abs(chart.t4_of(t0) - t4) > tol) continue;

          // Candidate outgoing directions: the tangent, or the explicit line
          // branches when the seed sits on a conic node.
          std::vector<Vec3> bases;
          try {
            bases.push_back(chart.tangent_at(t0));
          } catch (const PegError& err) {
            if (err.code() != ErrorCode::SingularPoint) throw;
            for (const ConicBranch& br : chart.branches()) {
              if (br.form == ConicBranch::Form::Line) {
                bases.push_back(lift_direction(chart, br.ax1));
              }
            }
          }

          for (const Vec3& base : bases) {
            for (double sgn : {1.0, -1.0}) {
              const Vec3 tau = base * sgn;
              const double gamma = rect_speed(quad, tau);
              const auto probe = correct(chart, t0 + tau * (cfg.h0 / gamma),
                                         cfg.corrector_tol);
              if (!probe) continue;
              if (!chart.in_box(*probe, cfg.wall_tol)) continue;
              const LabeledRectangle r = chart.rectangle_at(*probe);
              const double grown = deg_x ? r.X : r.Y;
              if (grown < 0.05 * cfg.h0) continue;  // stays degenerate
              const auto s = boundary_params_of(p, quad, *probe,
                                                chart.t4_of(*probe));
              if (cyclic_winding(s, p.perimeter(), 1e-9 * p.perimeter()) > 1)
                continue;
              out.push_back(SeedStart{quad, t0, normalize3(*probe - t0)});
            }
          }
        }
      }
    }
  }
  if (out.empty()) {
    throw PegError(ErrorCode::NoViableChart,
                   "no chart admits an outgoing gracing arc at this seed");
  }
  return out;
}

EdgeQuadruple chart_transition(const Polygon& p, const EdgeQuadruple& quad,
                               int slot, int side) {
  const int e = quad.seg[static_cast<size_t>(slot)].edge_index;
  if (e < 0) {
    throw PegError(ErrorCode::DeadEnd, "transition needs polygon-backed edges");
  }
  auto idx = quad.indices();
  idx[static_cast<size_t>(slot)] = side == 0 ? p.prev_edge(e) : p.next_edge(e);
  return EdgeQuadruple::from_polygon(p, idx);
}

namespace {

struct TerminalInfo {
  int diameter;
  int shift;
  LabeledRectangle exact;
};

// Matches a nearly degenerate rectangle to a positive diameter and snaps to
// the exact seed labeling.
std::optional<TerminalInfo> match_terminal(
    const std::vector<Diameter>& diameters, const LabeledRectangle& rect,
    bool axis_x, double tol) {
  const Point a = axis_x ? (rect[0] + rect[1]) / 2 : (rect[1] + rect[2]) / 2;
  const Point b = axis_x ? (rect[2] + rect[3]) / 2 : (rect[3] + rect[0]) / 2;
  for (int i = 0; i < static_cast<int>(diameters.size()); ++i) {
    const Diameter& d = diameters[static_cast<size_t>(i)];
    const bool fwd = distance(a, d.q1.p) <= tol && distance(b, d.q2.p) <= tol;
    const bool rev = distance(a, d.q2.p) <= tol && distance(b, d.q1.p) <= tol;
    if (!fwd && !rev) continue;
    const auto seeds = seed_rectangles(d);
    int best = -1;
    double bestd = tol * 4;
    for (int k = 0; k < 4; ++k) {
      const double dist = rect_distance(rect, seeds[static_cast<size_t>(k)]);
      if (dist < bestd) {
        bestd = dist;
        best = k;
      }
    }
    if (best >= 0) return TerminalInfo{i, best, seeds[static_cast<size_t>(best)]};
  }
  return std::nullopt;
}

}  // namespace

ArcComponent continue_component(const Polygon& p,
                                const std::vector<Diameter>& diameters,
                                const SeedStart& start,
                                const TraceConfig::Abs& cfg) {
  Stepper st(p, cfg, start);
  ArcComponent comp;
  comp.inscribing.push_back(st.quad);

  auto record = [&](const LabeledRectangle& rect, const Vec3& t) {
    TraceSample s;
    s.rect = rect;
    s.t = t;
    s.chart_id = static_cast<int>(comp.inscribing.size()) - 1;
    s.arclen = comp.samples.empty()
                   ? 0.0
                   : comp.samples.back().arclen +
                         rect_step_norm(comp.samples.back().rect, rect);
    comp.samples.push_back(std::move(s));
  };

  const LabeledRectangle seed_rect = st.chart.rectangle_at(st.t);
  record(seed_rect, st.t);
  bool escaped_x = seed_rect.X > 5 * cfg.eps_deg;
  bool escaped_y = seed_rect.Y > 5 * cfg.eps_deg;
  const bool seeded_degenerate =
      seed_rect.X <= cfg.eps_deg || seed_rect.Y <= cfg.eps_deg;

  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto info = st.advance();
    const LabeledRectangle rect = st.chart.rectangle_at(st.t);
    record(rect, st.t);

    escaped_x = escaped_x || rect.X > 5 * cfg.eps_deg;
    escaped_y = escaped_y || rect.Y > 5 * cfg.eps_deg;

    // Degenerate endpoints usually sit on box walls (their chord ends touch
    // polygon vertices), so the axis check must precede any transition.
    const bool hit_x = escaped_x && rect.X <= cfg.eps_deg;
    const bool hit_y = escaped_y && rect.Y <= cfg.eps_deg;
    if (hit_x || hit_y) {
      // Extrapolate the side length to zero along the tangent, then snap to
      // the matched diameter's exact degenerate labeling.
      Vec3 tau = st.dir;
      try {
        tau = tangent_or_branch(st.chart, st.t, st.dir);
      } catch (const PegError&) {
      }
      const auto v = velocity8(st.quad, tau);
      const Vec2 side = hit_x ? rect[0] - rect[1] : rect[1] - rect[2];
      const Vec2 dside = hit_x ? v[0] - v[1] : v[1] - v[2];
      const double len = hit_x ? rect.X : rect.Y;
      LabeledRectangle final_rect = rect;
      Vec3 t_end = st.t;
      if (len > 0) {
        const double slope = dot(side / len, dside);
        if (std::abs(slope) > 1e-9) {
          const double sigma = -len / slope;
          const double cap = 4.0 * cfg.eps_deg / std::max(std::abs(slope), 1e-9);
          if (std::abs(sigma) <= cap) {
            t_end = st.t + tau * sigma;
            final_rect = st.chart.rectangle_at(t_end);
          }
        }
      }
      const auto term =
          match_terminal(diameters, final_rect, hit_x, 10.0 * cfg.eps_deg);
      if (!term) {
        const Point a = hit_x ? (final_rect[0] + final_rect[1]) / 2
                              : (final_rect[1] + final_rect[2]) / 2;
        const Point b = hit_x ? (final_rect[2] + final_rect[3]) / 2
                              : (final_rect[3] + final_rect[0]) / 2;
        throw PegError(ErrorCode::UnmatchedTerminalDiameter,
                       "arc endpoint chord (" + std::to_string(a.x) + ", " +
                           std::to_string(a.y) + ")-(" + std::to_string(b.x) +
                           ", " + std::to_string(b.y) +
                           ") matches no positive diameter");
      }
      record(term->exact, t_end);
      comp.end1 = ComponentEndpoint{term->diameter, term->shift};
      comp.cls = [&] {
        const bool start_on_y = seed_rect.X <= cfg.eps_deg;  // X = 0
        const bool end_on_y = hit_x;
        if (start_on_y != end_on_y) return ComponentClass::Hyperbolic;
        return end_on_y ? ComponentClass::NullY : ComponentClass::NullX;
      }();
      comp.non_generic = st.non_generic;
      return comp;
    }

    if (info.outcome == Stepper::Outcome::WallEvent) {
      if (!st.transition(info.slot, info.side)) {
        if (!st.graze_past()) {
          throw PegError(ErrorCode::DeadEnd,
                         "no continuation through a polygon vertex contact");
        }
        st.non_generic = true;
        record(st.chart.rectangle_at(st.t), st.t);
      } else if (!(comp.inscribing.back() == st.quad)) {
        comp.inscribing.push_back(st.quad);
        if (quad_repeat_count(comp.inscribing) > 64) {
          throw PegError(ErrorCode::RepeatBoundViolated,
                         "a quadruple repeats beyond the component bound");
        }
      }
    }

    // Loop closure: back to the start after real travel.
    if (!seeded_degenerate && comp.samples.back().arclen > 5 * cfg.h_max) {
      const double d = rect_step_norm(rect, comp.samples.front().rect);
      if (d <= 0.6 * std::max(st.h, cfg.h0)) {
        comp.samples.push_back(comp.samples.front());
        comp.samples.back().arclen =
            comp.samples[comp.samples.size() - 2].arclen + d;
        comp.samples.back().chart_id =
            comp.samples[comp.samples.size() - 2].chart_id;
        comp.cls = ComponentClass::Loop;
        comp.non_generic = st.non_generic;
        return comp;
      }
    }
  }
  throw PegError(ErrorCode::StepBudgetExhausted,
                 "component exceeded the step budget");
}

std::vector<EdgeQuadruple> inscribing_sequence(const ArcComponent& arc) {
  if (quad_repeat_count(arc.inscribing) > 64) {
    throw PegError(ErrorCode::RepeatBoundViolated,
                   "a quadruple repeats beyond the component bound");
  }
  return arc.inscribing;
}

namespace {

// A deterministic sort key so runs are reproducible.
bool component_less(const ArcComponent& a, const ArcComponent& b) {
  auto key = [](const ArcComponent& c) {
    const int d0 = c.end0 ? c.end0->diameter : 1 << 20;
    const int s0 = c.end0 ? c.end0->shift : 0;
    const int d1 = c.end1 ? c.end1->diameter : 1 << 20;
    const int s1 = c.end1 ? c.end1->shift : 0;
    return std::array<double, 7>{
        static_cast<double>(static_cast<int>(c.cls)),
        static_cast<double>(std::min(d0, d1)),
        static_cast<double>(std::max(d0, d1)),
        static_cast<double>(std::min(s0, s1)),
        static_cast<double>(std::max(s0, s1)),
        c.samples.empty() ? 0.0 : c.samples.front().rect.X,
        c.samples.empty() ? 0.0 : c.samples.front().rect.Y};
  };
  return key(a) < key(b);
}

LabeledRectangle mid_rect(const ArcComponent& c) {
  const double half = c.length() / 2;
  for (const TraceSample& s : c.samples) {
    if (s.arclen >= half) return s.rect;
  }
  return c.samples.back().rect;
}

}  // namespace

std::vector<ArcComponent> trace_all(const Polygon& p, const TraceConfig& cfg0) {
  const TraceConfig::Abs cfg = cfg0.resolve(p.perimeter());
  const DiameterReport rep = analyze_diameters(p);
  if (rep.has_tricky()) {
    throw PegError(ErrorCode::TrickyDiameter,
                   "polygon has a vertex-vertex diameter with an incident "
                   "perpendicular edge; tracing requires none");
  }
  if (!rep.degenerate_families.empty()) {
    throw PegError(ErrorCode::InputError,
                   "polygon carries parallel-edge degenerate rectangle "
                   "families; tracing requires a generic polygon");
  }
  if (!rep.undecided.empty()) {
    throw PegError(ErrorCode::InputError,
                   "diameter orientation could not be decided everywhere");
  }
  const std::vector<Diameter>& diams = rep.positive;

  std::vector<ArcComponent> traced;
  for (int di = 0; di < static_cast<int>(diams.size()); ++di) {
    const auto seeds = seed_rectangles(diams[static_cast<size_t>(di)]);
    for (int k = 0; k < 4; ++k) {
      const auto starts =
          initial_chart(p, seeds[static_cast<size_t>(k)], cfg);
      for (const SeedStart& s : starts) {
        ArcComponent c = continue_component(p, diams, s, cfg);
        c.end0 = ComponentEndpoint{di, k};
        c.shift = k;
        canonicalize(c, p);
        traced.push_back(std::move(c));
      }
    }
  }

  // Each arc is found from both of its ends; deduplicate by endpoint pair
  // and midpoint proximity.
  std::sort(traced.begin(), traced.end(), component_less);
  std::vector<ArcComponent> comps;
  for (ArcComponent& c : traced) {
    bool dup = false;
    for (const ArcComponent& kept : comps) {
      if (kept.cls != c.cls) continue;
      auto keyof = [](const ArcComponent& x) {
        std::array<int, 4> k{x.end0 ? x.end0->diameter : -1,
                             x.end0 ? x.end0->shift : -1,
                             x.end1 ? x.end1->diameter : -1,
                             x.end1 ? x.end1->shift : -1};
        if (std::make_pair(k[0], k[1]) > std::make_pair(k[2], k[3])) {
          std::swap(k[0], k[2]);
          std::swap(k[1], k[3]);
        }
        return k;
      };
      if (keyof(kept) != keyof(c)) continue;
      if (rect_distance(mid_rect(kept), mid_rect(c)) <= 20 * cfg.h_max) {
        dup = true;
        break;
      }
    }
    if (!dup) comps.push_back(std::move(c));
  }

  // Loop components: seed from oracle rectangles not on any traced arc.
  if (cfg.loop_grid > 0) {
    RectIndex index(std::max(10 * cfg.h_max, 1e-12));
    for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
      const auto& c = comps[static_cast<size_t>(ci)];
      for (int si = 0; si < static_cast<int>(c.samples.size()); ++si) {
        const auto& r = c.samples[static_cast<size_t>(si)].rect;
        index.add(ci, si, r.X, r.Y);
      }
    }
    auto near_traced = [&](const LabeledRectangle& r) {
      bool found = false;
      index.for_near(r.X, r.Y, 3, [&](int ci, int si) {
        if (rect_distance(
                comps[static_cast<size_t>(ci)].samples[static_cast<size_t>(si)].rect,
                r) <= 10 * cfg.h_max)
          found = true;
        return found;
      });
      return found;
    };

    for (const LabeledRectangle& hit : sample_all(p, cfg.loop_grid)) {
      if (near_traced(hit)) continue;
      // Assign edges and walk; a closed orbit comes back, an arc would have
      // been seen already but is stitched in regardless.
      std::vector<SeedStart> starts;
      try {
        TraceConfig::Abs loose = cfg;
        loose.eps_deg = -1.0;  // the seed is nondegenerate; skip growth test
        starts = initial_chart(p, hit, loose);
      } catch (const PegError&) {
        continue;
      }
      if (starts.empty()) continue;
      ArcComponent c = continue_component(p, diams, starts[0], cfg);
      if (c.cls != ComponentClass::Loop) {
        // Walked onto a diameter: trace the other way and stitch the arc.
        SeedStart back = starts[0];
        back.dir = back.dir * -1.0;
        ArcComponent c2 = continue_component(p, diams, back, cfg);
        ArcComponent merged;
        merged.cls = ComponentClass::Hyperbolic;
        auto quads2 = per_sample_quads(c2);
        auto quads1 = per_sample_quads(c);
        std::vector<EdgeQuadruple> qs;
        std::reverse(c2.samples.begin(), c2.samples.end());
        std::reverse(quads2.begin(), quads2.end());
        merged.samples = c2.samples;
        qs = quads2;
        merged.samples.insert(merged.samples.end(), c.samples.begin() + 1,
                              c.samples.end());
        qs.insert(qs.end(), quads1.begin() + 1, quads1.end());
        rebuild_inscribing(merged, qs);
        recompute_arclen(merged);
        merged.end0 = c2.end1;
        merged.end1 = c.end1;
        const bool on_y0 = merged.samples.front().rect.X <= cfg.eps_deg;
        const bool on_y1 = merged.samples.back().rect.X <= cfg.eps_deg;
        merged.cls = on_y0 == on_y1
                         ? (on_y0 ? ComponentClass::NullY : ComponentClass::NullX)
                         : ComponentClass::Hyperbolic;
        c = std::move(merged);
      }
      canonicalize(c, p);
      bool dup = false;
      for (const ArcComponent& kept : comps) {
        if (kept.cls == c.cls &&
            rect_distance(mid_rect(kept), mid_rect(c)) <= 20 * cfg.h_max) {
          dup = true;
          break;
        }
      }
      if (!dup) {
        comps.push_back(std::move(c));
        const int ci = static_cast<int>(comps.size()) - 1;
        for (int si = 0; si < static_cast<int>(comps.back().samples.size());
             ++si) {
          const auto& r = comps.back().samples[static_cast<size_t>(si)].rect;
          index.add(ci, si, r.X, r.Y);
        }
      }
    }
  }

  std::sort(comps.begin(), comps.end(), component_less);

  // Orbit tagging under cyclic relabeling.
  RectIndex index(std::max(10 * cfg.h_max, 1e-12));
  for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
    const auto& c = comps[static_cast<size_t>(ci)];
    for (int si = 0; si < static_cast<int>(c.samples.size()); ++si) {
      const auto& r = c.samples[static_cast<size_t>(si)].rect;
      index.add(ci, si, r.X, r.Y);
    }
  }
  std::vector<int> parent(comps.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
    const LabeledRectangle sm = shifted(mid_rect(comps[static_cast<size_t>(ci)]), 1);
    int best = -1;
    double bestd = 20 * cfg.h_max;
    index.for_near(sm.X, sm.Y, 3, [&](int cj, int sj) {
      const double d = rect_distance(
          comps[static_cast<size_t>(cj)].samples[static_cast<size_t>(sj)].rect, sm);
      if (d < bestd) {
        bestd = d;
        best = cj;
      }
      return d <= cfg.h_max;
    });
    if (best >= 0) {
      const int ra = find(ci), rb = find(best);
      if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
  }
  std::map<int, int> orbit_ids;
  for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
    const int root = find(ci);
    auto [it, inserted] = orbit_ids.try_emplace(root, static_cast<int>(orbit_ids.size()));
    comps[static_cast<size_t>(ci)].orbit = it->second;
  }
  return comps;
}

OracleCheck oracle_equivalence(const Polygon& p,
                               const std::vector<ArcComponent>& comps,
                               int grid_n, double h_max) {
  OracleCheck out;
  const auto hits = sample_all(p, grid_n);
  out.hits = static_cast<int>(hits.size());

  RectIndex index(std::max(10 * h_max, 1e-12));
  for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
    const auto& c = comps[static_cast<size_t>(ci)];
    for (int si = 0; si < static_cast<int>(c.samples.size()); ++si) {
      const auto& r = c.samples[static_cast<size_t>(si)].rect;
      index.add(ci, si, r.X, r.Y);
    }
  }
  for (const LabeledRectangle& hit : hits) {
    double best = 1e300;
    index.for_near(hit.X, hit.Y, 3, [&](int ci, int si) {
      best = std::min(best, rect_distance(
          comps[static_cast<size_t>(ci)].samples[static_cast<size_t>(si)].rect, hit));
      return best <= 2.0 * h_max;
    });
    out.forward_max = std::max(out.forward_max, best);
    if (best > 10 * h_max) out.forward_ok = false;
  }

  // Converse: traced samples away from the degenerate fringe must have an
  // oracle hit within the grid resolution. Shooting finds skinny rectangles
  // reliably only through their long-side labelings, so hits are matched up
  // to cyclic relabeling.
  const double res = p.perimeter() / (grid_n * p.size());
  const double radius = 4.0 * res;
  std::vector<LabeledRectangle> hit_shifts;
  hit_shifts.reserve(hits.size() * 4);
  for (const LabeledRectangle& h : hits) {
    for (int k = 0; k < 4; ++k) hit_shifts.push_back(shifted(h, k));
  }
  RectIndex hindex(std::max(radius, 1e-12));
  for (int hi = 0; hi < static_cast<int>(hit_shifts.size()); ++hi) {
    hindex.add(0, hi, hit_shifts[static_cast<size_t>(hi)].X,
               hit_shifts[static_cast<size_t>(hi)].Y);
  }
  for (const ArcComponent& c : comps) {
    // Consecutive samples are a step apart, so the previous sample's hit
    // usually still qualifies; query the index only when it drifts away.
    int coherent = -1;
    for (const TraceSample& s : c.samples) {
      if (std::min(s.rect.X, s.rect.Y) <= 3.0 * res) continue;
      double best = 1e300;
      if (coherent >= 0) {
        best = rect_distance(hit_shifts[static_cast<size_t>(coherent)], s.rect);
      }
      if (best > 0.75 * radius) {
        best = 1e300;
        hindex.for_near(s.rect.X, s.rect.Y, 2, [&](int, int hi) {
          const double d =
              rect_distance(hit_shifts[static_cast<size_t>(hi)], s.rect);
          if (d < best) {
            best = d;
            coherent = hi;
          }
          return best <= 0.5 * radius;
        });
      }
      out.backward_max = std::max(out.backward_max, best);
      if (best > radius) out.backward_ok = false;
    }
  }
  return out;
}

}  // namespace pegtrace
