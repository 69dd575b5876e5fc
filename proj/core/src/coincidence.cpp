#include "pegtrace/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pegtrace {

bool really_distinct(const LabeledRectangle& a, const LabeledRectangle& b,
                     double tol) {
  for (int k = 0; k < 4; ++k) {
    if (rect_distance(a, shifted(b, k)) <= tol) return false;
    // Reversal: same vertex set traversed the other way.
    const LabeledRectangle rev = LabeledRectangle::from_vertices(
        b.v[static_cast<size_t>(k)], b.v[static_cast<size_t>((k + 3) % 4)],
        b.v[static_cast<size_t>((k + 2) % 4)], b.v[static_cast<size_t>((k + 1) % 4)]);
    if (rect_distance(a, rev) <= tol) return false;
  }
  return true;
}

namespace {

bool segment_cross(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                   const Vec2& b1, Vec2* z, double* angle) {
  const Vec2 da = a1 - a0;
  const Vec2 db = b1 - b0;
  const double denom = cross(da, db);
  const double scale = norm(da) * norm(db);
  if (std::abs(denom) <= 1e-14 * scale) return false;
  const double t = cross(b0 - a0, db) / denom;
  const double u = cross(b0 - a0, da) / denom;
  if (t < 0 || t > 1 || u < 0 || u > 1) return false;
  *z = a0 + da * t;
  *angle = std::asin(std::min(1.0, std::abs(denom) / scale));
  return true;
}

// Bucket index of curve segments over the plane for near-linear pair sweeps.
struct SegGrid {
  double cell;
  std::unordered_map<int64_t, std::vector<int>> buckets;
  static int64_t key(int ix, int iy) {
    return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
  }
  explicit SegGrid(const ShapeCurve& c, double cell_size) : cell(cell_size) {
    for (int i = 0; i + 1 < static_cast<int>(c.pts.size()); ++i) {
      add_segment(c, i);
    }
  }
  void add_segment(const ShapeCurve& c, int i) {
    const Vec2& a = c.pts[static_cast<size_t>(i)];
    const Vec2& b = c.pts[static_cast<size_t>(i + 1)];
    const int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) / cell));
    const int x1 = static_cast<int>(std::floor(std::max(a.x, b.x) / cell));
    const int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) / cell));
    const int y1 = static_cast<int>(std::floor(std::max(a.y, b.y) / cell));
    for (int ix = x0; ix <= x1; ++ix) {
      for (int iy = y0; iy <= y1; ++iy) {
        buckets[key(ix, iy)].push_back(i);
      }
    }
  }
  template <typename F>
  void for_candidates(const Vec2& a, const Vec2& b, F&& f) const {
    const int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) / cell));
    const int x1 = static_cast<int>(std::floor(std::max(a.x, b.x) / cell));
    const int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) / cell));
    const int y1 = static_cast<int>(std::floor(std::max(a.y, b.y) / cell));
    for (int ix = x0; ix <= x1; ++ix) {
      for (int iy = y0; iy <= y1; ++iy) {
        const auto it = buckets.find(key(ix, iy));
        if (it == buckets.end()) continue;
        for (int j : it->second) f(j);
      }
    }
  }
};

double curve_cell_size(const ShapeCurve& c) {
  double maxseg = 0.0, span = 0.0;
  for (size_t i = 0; i + 1 < c.pts.size(); ++i) {
    maxseg = std::max(maxseg, norm(c.pts[i + 1] - c.pts[i]));
  }
  for (const Vec2& z : c.pts) span = std::max({span, z.x, z.y});
  return std::max({2.0 * maxseg, span / 512.0, 1e-12});
}

}  // namespace

std::vector<CurveCrossing> curve_intersections(const ShapeCurve& a,
                                               const ShapeCurve& b,
                                               double axis_tol) {
  std::vector<CurveCrossing> out;
  if (a.pts.size() < 2 || b.pts.size() < 2) return out;
  const SegGrid grid(b, curve_cell_size(b));
  for (int i = 0; i + 1 < static_cast<int>(a.pts.size()); ++i) {
    const Vec2& a0 = a.pts[static_cast<size_t>(i)];
    const Vec2& a1 = a.pts[static_cast<size_t>(i + 1)];
    grid.for_candidates(a0, a1, [&](int j) {
      Vec2 z;
      double angle;
      if (!segment_cross(a0, a1, b.pts[static_cast<size_t>(j)],
                         b.pts[static_cast<size_t>(j + 1)], &z, &angle))
        return;
      if (z.x <= axis_tol || z.y <= axis_tol) return;  // degenerate fringe
      CurveCrossing c;
      c.seg_a = i;
      c.seg_b = j;
      c.z = z;
      c.angle = angle;
      out.push_back(c);
    });
  }
  std::sort(out.begin(), out.end(), [](const CurveCrossing& a2, const CurveCrossing& b2) {
    return std::pair(a2.seg_a, a2.seg_b) < std::pair(b2.seg_a, b2.seg_b);
  });
  return out;
}

std::vector<CurveCrossing> self_intersections(const ShapeCurve& a,
                                              double axis_tol) {
  std::vector<CurveCrossing> all = curve_intersections(a, a, axis_tol);
  std::vector<CurveCrossing> out;
  for (CurveCrossing& c : all) {
    if (c.seg_b <= c.seg_a + 1) continue;  // adjacent or duplicate pair
    if (c.seg_a == 0 &&
        c.seg_b + 2 == static_cast<int>(a.pts.size()))
      continue;  // closed curves: first and last segments touch
    out.push_back(c);
  }
  return out;
}

namespace {

// Walks a small neighborhood of one sample along its component's conic.
struct CurveCursor {
  const ArcComponent* comp;
  Chart chart;
  Vec3 t{};
  Vec3 fwd{};  // unit chart direction toward increasing sample index
  double base_arclen = 0.0;
  double offset = 0.0;
  double gamma = 1.0;

  static CurveCursor at(const ArcComponent& c, int seg, double corrector_tol) {
    CurveCursor cur;
    cur.comp = &c;
    const TraceSample& s = c.samples[static_cast<size_t>(seg)];
    cur.chart = Chart::build(
        c.inscribing[static_cast<size_t>(s.chart_id)]);
    cur.t = s.t;
    cur.base_arclen = s.arclen;
    Vec3 d{};
    const TraceSample& nxt = c.samples[static_cast<size_t>(seg + 1)];
    for (int k = 0; k < 3; ++k) d[static_cast<size_t>(k)] = nxt.t[static_cast<size_t>(k)] - s.t[static_cast<size_t>(k)];
    const double n = norm3(d);
    if (n > 0) {
      for (auto& v : d) v /= n;
    } else {
      d = cur.chart.tangent_at(cur.t);
    }
    cur.fwd = d;
    (void)corrector_tol;
    cur.update_speed();
    return cur;
  }

  void update_speed() {
    const auto v1 = chart.quad().seg[0].dir * fwd[0];
    const auto v2 = chart.quad().seg[1].dir * fwd[1];
    const auto v3 = chart.quad().seg[2].dir * fwd[2];
    const auto v4 = v1 - v2 + v3;
    gamma = std::sqrt(norm2(v1) + norm2(v2) + norm2(v3) + norm2(v4));
  }

  LabeledRectangle rect() const { return chart.rectangle_at(t); }

  // d(X, Y)/d(arc length) via the tangent.
  Vec2 dz() const {
    const Vec3 tau = chart.tangent_at(t, fwd);
    const auto v1 = chart.quad().seg[0].dir * tau[0];
    const auto v2 = chart.quad().seg[1].dir * tau[1];
    const auto v3 = chart.quad().seg[2].dir * tau[2];
    const LabeledRectangle r = rect();
    const Vec2 sx = (r[0] - r[1]) / std::max(r.X, 1e-300);
    const Vec2 sy = (r[1] - r[2]) / std::max(r.Y, 1e-300);
    const double g = std::sqrt(norm2(v1) + norm2(v2) + norm2(v3) +
                               norm2(v1 - v2 + v3));
    return Vec2{dot(sx, v1 - v2), dot(sy, v2 - v3)} / g;
  }

  bool step(double ds, double corrector_tol) {
    const Vec3 tau = [&]() -> Vec3 {
      try {
        return chart.tangent_at(t, fwd);
      } catch (const PegError&) {
        return fwd;
      }
    }();
    const Vec3 pred = t + tau * (ds / gamma);
    // Project back to the conic.
    Vec3 cur = pred;
    for (int it = 0; it < 12; ++it) {
      const double fp = chart.plane_value(cur);
      const double fq = chart.quadric_value(cur);
      if (std::abs(fp) <= corrector_tol &&
          std::abs(fq) <= corrector_tol * chart.len_scale())
        break;
      const auto& c = chart.plane_coeffs();
      const Vec3 n{c[1], c[2], c[3]};
      const Vec3 g = chart.quadric_gradient(cur);
      const double a11 = dot3(n, n), a12 = dot3(n, g), a22 = dot3(g, g);
      const double det = a11 * a22 - a12 * a12;
      if (!(det > 1e-300)) return false;
      const double y1 = (-fp * a22 + fq * a12) / det;
      const double y2 = (-fq * a11 + fp * a12) / det;
      cur = cur + Vec3{n[0] * y1 + g[0] * y2, n[1] * y1 + g[1] * y2,
                       n[2] * y1 + g[2] * y2};
    }
    if (std::abs(chart.plane_value(cur)) > 1e3 * corrector_tol) return false;
    fwd = ds >= 0 ? tau : tau * -1.0;
    t = cur;
    offset += ds;
    update_speed();
    return true;
  }
};

}  // namespace

Coincidence refine_coincidence(const Polygon& p,
                               const std::vector<ArcComponent>& comps,
                               const CurveCrossing& crossing,
                               const TraceConfig& cfg) {
  const auto abs_cfg = cfg.resolve(p.perimeter());
  const double tol_match = 1e-9 * p.perimeter();
  // Converge well past the match tolerance so that relabeled copies of the
  // same coincidence land in one cluster.
  const double tol_refine =
      std::max(1e-3 * tol_match, 1e-14 * (1.0 + p.perimeter()));

  CurveCursor a = CurveCursor::at(comps[static_cast<size_t>(crossing.comp_a)],
                                  crossing.seg_a, abs_cfg.corrector_tol);
  CurveCursor b = CurveCursor::at(comps[static_cast<size_t>(crossing.comp_b)],
                                  crossing.seg_b, abs_cfg.corrector_tol);

  double err_prev = 1e300;
  for (int it = 0; it < 25; ++it) {
    const LabeledRectangle ra = a.rect();
    const LabeledRectangle rb = b.rect();
    const Vec2 f{ra.X - rb.X, ra.Y - rb.Y};
    const double err = std::abs(f.x) + std::abs(f.y);
    if (err <= tol_refine) break;
    if (it == 24 || (err > 0.9 * err_prev && it > 8)) {
      if (err <= tol_match) break;  // converged to spec tolerance
      throw PegError(ErrorCode::NotConverged,
                     "coincidence refinement stalled");
    }
    err_prev = err;
    Vec2 da, db;
    try {
      da = a.dz();
      db = b.dz();
    } catch (const PegError&) {
      throw PegError(ErrorCode::NotConverged,
                     "singular tangent during refinement");
    }
    const double det = -da.x * db.y + da.y * db.x;
    if (std::abs(det) < 1e-14) {
      throw PegError(ErrorCode::NotConverged, "tangential crossing");
    }
    // Solve [da, -db] (sa, sb)^T = -f.
    double sa = (-f.x * -db.y - -f.y * -db.x) / det;
    double sb = (da.x * -f.y - da.y * -f.x) / det;
    const double cap = 4.0 * abs_cfg.h_max;
    sa = std::clamp(sa, -cap, cap);
    sb = std::clamp(sb, -cap, cap);
    if (!a.step(sa, abs_cfg.corrector_tol) ||
        !b.step(sb, abs_cfg.corrector_tol)) {
      throw PegError(ErrorCode::NotConverged,
                     "refinement left the chart box");
    }
  }

  const LabeledRectangle ra = a.rect();
  const LabeledRectangle rb = b.rect();
  if (!really_distinct(ra, rb, 10 * tol_match)) {
    throw PegError(ErrorCode::NotReallyDistinct,
                   "crossing was a relabeling artifact");
  }
  const double geo_tol = std::max(1e-6 * p.perimeter(), 10 * p.eps_geo());
  if (!graces(p, ra, geo_tol) || !graces(p, rb, geo_tol)) {
    throw PegError(ErrorCode::NotConverged,
                   "refined participant left the boundary");
  }

  Coincidence c;
  c.X = 0.5 * (ra.X + rb.X);
  c.Y = 0.5 * (ra.Y + rb.Y);
  c.low_confidence = crossing.angle < 1e-4;
  c.participants.push_back(
      Participant{crossing.comp_a, a.base_arclen + a.offset, ra});
  c.participants.push_back(
      Participant{crossing.comp_b, b.base_arclen + b.offset, rb});
  c.mu = 1;
  return c;
}

std::vector<ArcComponent> orbit_representatives(
    const std::vector<ArcComponent>& comps) {
  // One representative per orbit plus one odd-shift image (its shape curve
  // is the diagonal reflection, which carries the mirrored coincidences).
  std::vector<ArcComponent> out;
  std::vector<int> done;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (std::count(done.begin(), done.end(), comps[i].orbit)) continue;
    done.push_back(comps[i].orbit);
    out.push_back(comps[i]);
    const ShapeCurve zi = shape_curve(comps[i]);
    const Vec2 probe = zi.pts[zi.pts.size() / 2];
    const Vec2 mirror{probe.y, probe.x};
    double best = 1e300;
    size_t pick = i;
    for (size_t j = 0; j < comps.size(); ++j) {
      if (j == i || comps[j].orbit != comps[i].orbit) continue;
      const ShapeCurve zj = shape_curve(comps[j]);
      double d = 1e300;
      for (size_t k = 0; k < zj.pts.size(); k += 7) {
        d = std::min(d, norm(zj.pts[k] - mirror));
      }
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    if (pick != i) out.push_back(comps[pick]);
  }
  return out;
}

CoincidenceReport count_M(const Polygon& p,
                          const std::vector<ArcComponent>& comps,
                          const TraceConfig& cfg) {
  CoincidenceReport rep;
  const DiameterReport diams = analyze_diameters(p);
  rep.delta_plus = diams.delta_plus();
  rep.infinite_families = static_cast<int>(diams.degenerate_families.size());
  const double tol_match = 1e-9 * p.perimeter();
  const double axis_tol = 10.0 * cfg.eps_deg_rel * p.perimeter();

  std::vector<ShapeCurve> curves;
  curves.reserve(comps.size());
  for (const ArcComponent& c : comps) curves.push_back(shape_curve(c));

  // Two-shift relabelings have pointwise identical shape curves; their
  // overlap produces only degenerate crossing artifacts, so those pairs are
  // skipped outright.
  const double h_max = cfg.h_max_rel * p.perimeter();
  auto shift2_pair = [&](const ArcComponent& a, const ArcComponent& b) {
    if (a.orbit != b.orbit || a.cls != b.cls) return false;
    if (a.end0 && a.end1 && b.end0 && b.end1) {
      auto eps = [](const ComponentEndpoint& e, int d) {
        return std::make_pair(e.diameter, (e.shift + d) % 4);
      };
      std::array<std::pair<int, int>, 2> sa{eps(*a.end0, 2), eps(*a.end1, 2)};
      std::array<std::pair<int, int>, 2> sb{eps(*b.end0, 0), eps(*b.end1, 0)};
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      return sa == sb;
    }
    if (a.samples.empty() || b.samples.empty()) return false;
    return rect_distance(shifted(a.samples.front().rect, 2),
                         b.samples.front().rect) <= 20 * h_max ||
           rect_distance(a.samples.front().rect,
                         shifted(b.samples.front().rect, 2)) <= 20 * h_max;
  };

  std::vector<CurveCrossing> raw;
  for (int i = 0; i < static_cast<int>(comps.size()); ++i) {
    for (const CurveCrossing& c :
         self_intersections(curves[static_cast<size_t>(i)], axis_tol)) {
      CurveCrossing cc = c;
      cc.comp_a = cc.comp_b = i;
      raw.push_back(cc);
    }
    for (int j = i + 1; j < static_cast<int>(comps.size()); ++j) {
      if (shift2_pair(comps[static_cast<size_t>(i)], comps[static_cast<size_t>(j)]))
        continue;
      for (const CurveCrossing& c : curve_intersections(
               curves[static_cast<size_t>(i)], curves[static_cast<size_t>(j)],
               axis_tol)) {
        CurveCrossing cc = c;
        cc.comp_a = i;
        cc.comp_b = j;
        raw.push_back(cc);
      }
    }
  }

  std::vector<Coincidence> points;
  for (const CurveCrossing& c : raw) {
    try {
      points.push_back(refine_coincidence(p, comps, c, cfg));
    } catch (const PegError& e) {
      if (e.code() == ErrorCode::NotReallyDistinct) continue;  // artifact
      ++rep.dropped;
    }
  }

  // Transitive clustering by side lengths (union-find over a sorted sweep).
  std::sort(points.begin(), points.end(),
            [](const Coincidence& a, const Coincidence& b) {
              return a.X != b.X ? a.X < b.X : a.Y < b.Y;
            });
  std::vector<int> parent(points.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  const auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i; j-- > 0;) {
      if (points[i].X - points[j].X > tol_match) break;
      if (std::abs(points[i].Y - points[j].Y) <= tol_match) {
        parent[static_cast<size_t>(find(static_cast<int>(i)))] =
            find(static_cast<int>(j));
      }
    }
  }
  std::unordered_map<int, size_t> root_cluster;
  std::vector<Coincidence> clusters;
  for (size_t i = 0; i < points.size(); ++i) {
    const int root = find(static_cast<int>(i));
    auto [it, inserted] = root_cluster.try_emplace(root, clusters.size());
    if (inserted) {
      Coincidence c;
      c.X = points[i].X;
      c.Y = points[i].Y;
      clusters.push_back(c);
    }
    Coincidence& cl = clusters[it->second];
    cl.low_confidence = cl.low_confidence || points[i].low_confidence;
    for (const Participant& q : points[i].participants) {
      bool dup = false;
      for (const Participant& have : cl.participants) {
        if (!really_distinct(have.rect, q.rect, 10 * tol_match)) {
          dup = true;
          break;
        }
      }
      if (!dup) cl.participants.push_back(q);
    }
  }

  for (Coincidence& cl : clusters) {
    const int n = static_cast<int>(cl.participants.size());
    if (n < 2) continue;
    cl.mu = n - 1;
    rep.M += cl.mu;
    rep.clusters.push_back(cl);
  }

  rep.bound_generic = 2 * (rep.delta_plus - 2);
  rep.bound_nontricky = static_cast<int>(
      std::ceil(std::max(0, rep.delta_plus - 2) / 16.0));
  rep.pass_generic = rep.M >= rep.bound_generic;
  rep.pass_nontricky = rep.M >= rep.bound_nontricky;
  return rep;
}

}  // namespace pegtrace
