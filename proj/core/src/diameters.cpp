#include "pegtrace/diameters.hpp"

#include <algorithm>
#include <cmath>

namespace pegtrace {

namespace {

constexpr double kAngularEps = 1e-9;       // unit-vector components
constexpr double kParallelEdgeEps = 1e-6;  // radians, parallel edge pairs

bool DiameterReportHasTricky(const std::vector<Diameter>& v) {
  return std::any_of(v.begin(), v.end(),
                     [](const Diameter& d) { return d.tricky; });
}

// Outgoing boundary directions at a parameter, split into the branch that
// continues counterclockwise (forward) and the one that goes back.
struct Branches {
  Vec2 forward;
  Vec2 backward;
};

Branches branches_at(const Polygon& p, double s) {
  Branches b;
  const double sw = p.wrap(s);
  const int e = p.edge_index_at(sw);
  const PolygonEdge& edge = p.edges()[static_cast<size_t>(e)];
  const double local = sw - edge.s0;
  const double eps = p.eps_geo();
  if (local <= eps) {
    // At the start vertex of edge e.
    b.forward = edge.dir;
    b.backward = -p.edges()[static_cast<size_t>(p.prev_edge(e))].dir;
  } else if (local >= edge.len - eps) {
    b.forward = p.edges()[static_cast<size_t>(p.next_edge(e))].dir;
    b.backward = -edge.dir;
  } else {
    b.forward = edge.dir;
    b.backward = -edge.dir;
  }
  return b;
}

struct EndpointAnalysis {
  double a = 0.0;  // P1-branch component along the chord toward the far end
  double btoward = 0.0;  // P2-branch
  double rx1 = 0.0;      // rotated x-components (chord vertical, q1 bottom)
  double rx2 = 0.0;
  bool flat = false;      // edge-interior endpoint, branches perpendicular
  bool ambiguous = false; // near-zero component at a vertex endpoint
  bool separates = false;
};

struct ChordAnalysis {
  EndpointAnalysis end[2];
  bool is_diameter = false;
  bool ambiguous = false;
  Vec2 chord_dir;  // q1 -> q2, unit
};

ChordAnalysis analyze_chord(const Polygon& p, const ChordCandidate& chord) {
  ChordAnalysis out;
  const Vec2 c = normalized(chord.q2.p - chord.q1.p);
  out.chord_dir = c;

  for (int endi = 0; endi < 2; ++endi) {
    const ChordEndpoint& q = endi == 0 ? chord.q1 : chord.q2;
    const Branches br = branches_at(p, q.s);
    // P1 is the counterclockwise arc q1 -> q2. Its outgoing branch is the
    // forward direction at q1 and the backward direction at q2.
    const Vec2 b1 = endi == 0 ? br.forward : br.backward;
    const Vec2 b2 = endi == 0 ? br.backward : br.forward;
    const Vec2 toward = endi == 0 ? c : -c;

    EndpointAnalysis& ea = out.end[endi];
    ea.a = dot(b1, toward);
    ea.btoward = dot(b2, toward);
    ea.rx1 = cross(b1, c);
    ea.rx2 = cross(b2, c);

    const bool z1 = std::abs(ea.a) <= kAngularEps;
    const bool z2 = std::abs(ea.btoward) <= kAngularEps;
    if (q.kind == EndpointKind::EdgeInterior) {
      if (z1 && z2) {
        ea.flat = true;  // straight edge lying on the perpendicular
      } else {
        ea.separates = (ea.a > 0) != (ea.btoward > 0);
      }
    } else {
      if (z1 || z2) {
        ea.ambiguous = true;  // tricky/unstable borderline, not guessed
      } else {
        ea.separates = (ea.a > 0) != (ea.btoward > 0);
      }
    }
  }

  out.ambiguous = out.end[0].ambiguous || out.end[1].ambiguous;
  out.is_diameter = !out.end[0].separates && !out.end[1].separates;
  return out;
}

// The open chord must stay inside the closed polygon. Boundary contact is
// fine: chords may run along edges or pass through reflex vertices.
bool chord_inside(const Polygon& p, const Point& a, const Point& b) {
  std::vector<double> events{0.0, 1.0};
  const Vec2 ab = b - a;
  const double len = norm(ab);
  if (len <= p.eps_geo()) return false;
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    const Point& c = p.vertices()[static_cast<size_t>(i)];
    const Point& d = p.vertices()[static_cast<size_t>((i + 1) % n)];
    const Vec2 cd = d - c;
    const double denom = cross(ab, cd);
    if (std::abs(denom) > 1e-12 * len * norm(cd)) {
      const double t = cross(c - a, cd) / denom;
      const double u = cross(c - a, ab) / denom;
      if (t > 0 && t < 1 && u >= 0 && u <= 1) events.push_back(t);
    } else {
      // Parallel: collinear overlap contributes its endpoints.
      if (std::abs(cross(c - a, ab)) <= p.eps_geo() * len) {
        for (const Point& q : {c, d}) {
          const double t = dot(q - a, ab) / (len * len);
          if (t > 0 && t < 1) events.push_back(t);
        }
      }
    }
  }
  std::sort(events.begin(), events.end());
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    const double tm = 0.5 * (events[i] + events[i + 1]);
    if (events[i + 1] - events[i] < 1e-12) continue;
    if (!p.contains(a + ab * tm)) return false;
  }
  return true;
}

ChordCandidate make_candidate(const Polygon& p, ChordEndpoint a,
                              ChordEndpoint b, bool degenerate = false) {
  ChordCandidate c;
  if (a.s > b.s) std::swap(a, b);
  c.q1 = a;
  c.q2 = b;
  c.degenerate_family = degenerate;
  return c;
}

bool incident_edge_perpendicular(const Polygon& p, const ChordEndpoint& q,
                                 const Vec2& chord_dir) {
  if (q.kind != EndpointKind::Vertex) return false;
  const int v = q.index;
  for (int e : {p.prev_edge(v), v}) {
    if (std::abs(dot(p.edges()[static_cast<size_t>(e)].dir, chord_dir)) <=
        kAngularEps) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool DiameterReport::has_tricky() const {
  return DiameterReportHasTricky(positive) || DiameterReportHasTricky(negative);
}

std::vector<ChordCandidate> enumerate_candidates(const Polygon& p) {
  std::vector<ChordCandidate> out;
  const int n = p.size();
  const double eps = p.eps_geo();

  auto vertex_endpoint = [&](int i) {
    ChordEndpoint q;
    q.p = p.vertices()[static_cast<size_t>(i)];
    q.s = p.edges()[static_cast<size_t>(i)].s0;
    q.kind = EndpointKind::Vertex;
    q.index = i;
    return q;
  };

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Point& a = p.vertices()[static_cast<size_t>(i)];
      const Point& b = p.vertices()[static_cast<size_t>(j)];
      if (!chord_inside(p, a, b)) continue;
      out.push_back(make_candidate(p, vertex_endpoint(i), vertex_endpoint(j)));
    }
  }

  for (int i = 0; i < n; ++i) {
    const Point& v = p.vertices()[static_cast<size_t>(i)];
    for (int e = 0; e < n; ++e) {
      if (e == i || e == p.prev_edge(i)) continue;
      const PolygonEdge& edge = p.edges()[static_cast<size_t>(e)];
      const double tf = dot(v - edge.a, edge.dir);
      if (tf <= eps || tf >= edge.len - eps) continue;  // foot must be interior
      const Point foot = edge.a + edge.dir * tf;
      if (distance(v, foot) <= eps) continue;
      if (!chord_inside(p, v, foot)) continue;
      ChordEndpoint qf;
      qf.p = foot;
      qf.s = p.wrap(edge.s0 + tf);
      qf.kind = EndpointKind::EdgeInterior;
      qf.index = e;
      out.push_back(make_candidate(p, vertex_endpoint(i), qf));
    }
  }

  // Parallel edge pairs carrying a common perpendicular chord between their
  // interiors: one representative, quarantined as a degenerate family.
  for (int e = 0; e < n; ++e) {
    for (int f = e + 1; f < n; ++f) {
      const PolygonEdge& ee = p.edges()[static_cast<size_t>(e)];
      const PolygonEdge& ef = p.edges()[static_cast<size_t>(f)];
      if (std::abs(cross(ee.dir, ef.dir)) > kParallelEdgeEps) continue;
      // Overlap of f's projection onto e's axis.
      const double p0 = dot(ef.a - ee.a, ee.dir);
      const double p1 = dot(ef.a + ef.dir * ef.len - ee.a, ee.dir);
      const double lo = std::max(0.0, std::min(p0, p1));
      const double hi = std::min(ee.len, std::max(p0, p1));
      if (hi - lo <= eps) continue;
      const double tm = 0.5 * (lo + hi);
      const Point qe = ee.a + ee.dir * tm;
      const double tf = dot(qe - ef.a, ef.dir);
      if (tf <= eps || tf >= ef.len - eps) continue;
      const Point qf = ef.a + ef.dir * tf;
      if (distance(qe, qf) <= eps) continue;
      if (!chord_inside(p, qe, qf)) continue;
      ChordEndpoint a{qe, p.wrap(ee.s0 + tm), EndpointKind::EdgeInterior, e};
      ChordEndpoint b{qf, p.wrap(ef.s0 + tf), EndpointKind::EdgeInterior, f};
      out.push_back(make_candidate(p, a, b, true));
    }
  }

  return out;
}

bool is_diameter(const Polygon& p, const ChordCandidate& chord) {
  const ChordAnalysis an = analyze_chord(p, chord);
  if (an.ambiguous) {
    throw PegError(ErrorCode::AmbiguousTangency,
                   "branch perpendicular to the chord at a vertex endpoint");
  }
  return an.is_diameter;
}

Orientation orientation_sign(const Polygon& p, const ChordCandidate& chord) {
  const ChordAnalysis an = analyze_chord(p, chord);
  bool left[2];
  for (int i = 0; i < 2; ++i) {
    const double d = an.end[i].rx1 - an.end[i].rx2;
    if (std::abs(d) <= kAngularEps) {
      throw PegError(ErrorCode::TieBreakFailure,
                     "branch directions are parallel at a chord endpoint");
    }
    left[i] = d < 0;
  }
  return left[0] == left[1] ? Orientation::Positive : Orientation::Negative;
}

Extremum classify_extremum(const Polygon& p, const ChordCandidate& chord) {
  const ChordAnalysis an = analyze_chord(p, chord);
  if (an.end[0].flat || an.end[1].flat) return Extremum::Flat;
  const bool max0 = an.end[0].a > 0 && an.end[0].btoward > 0;
  const bool max1 = an.end[1].a > 0 && an.end[1].btoward > 0;
  const bool min0 = an.end[0].a < 0 && an.end[0].btoward < 0;
  const bool min1 = an.end[1].a < 0 && an.end[1].btoward < 0;
  if (max0 && max1) return Extremum::Max;
  if (min0 && min1) return Extremum::Min;
  return Extremum::Saddle;
}

bool is_tricky(const Polygon& p, const ChordCandidate& chord) {
  if (chord.q1.kind != EndpointKind::Vertex ||
      chord.q2.kind != EndpointKind::Vertex)
    return false;
  const Vec2 c = normalized(chord.q2.p - chord.q1.p);
  return incident_edge_perpendicular(p, chord.q1, c) ||
         incident_edge_perpendicular(p, chord.q2, c);
}

bool is_stable(const Polygon& p, const ChordCandidate& chord) {
  const bool v1 = chord.q1.kind == EndpointKind::Vertex;
  const bool v2 = chord.q2.kind == EndpointKind::Vertex;
  if (!v1 && !v2) return false;
  const Vec2 c = normalized(chord.q2.p - chord.q1.p);
  if (v1 && incident_edge_perpendicular(p, chord.q1, c)) return false;
  if (v2 && incident_edge_perpendicular(p, chord.q2, c)) return false;
  return true;
}

DiameterReport analyze_diameters(const Polygon& p) {
  DiameterReport rep;
  const double eps = p.eps_geo();

  std::vector<ChordCandidate> cands = enumerate_candidates(p);
  for (const ChordCandidate& cand : cands) {
    if (cand.degenerate_family) {
      rep.degenerate_families.push_back(cand);
      continue;
    }
    const ChordAnalysis an = analyze_chord(p, cand);
    if (an.ambiguous) {
      // Either the tricky case (diameter with a perpendicular incident edge)
      // or an unresolved tangency; tricky ones keep their diameter status.
      if (is_tricky(p, cand)) {
        Diameter d;
        d.q1 = cand.q1;
        d.q2 = cand.q2;
        d.length = distance(cand.q1.p, cand.q2.p);
        d.tricky = true;
        d.stable = false;
        d.extremum = Extremum::Flat;
        try {
          d.orientation = orientation_sign(p, cand);
        } catch (const PegError&) {
          rep.undecided.push_back(cand);
          continue;
        }
        (d.orientation == Orientation::Positive ? rep.positive : rep.negative)
            .push_back(d);
      } else {
        rep.undecided.push_back(cand);
      }
      continue;
    }
    if (!an.is_diameter) continue;

    Diameter d;
    d.q1 = cand.q1;
    d.q2 = cand.q2;
    d.length = distance(cand.q1.p, cand.q2.p);
    d.extremum = classify_extremum(p, cand);
    d.tricky = is_tricky(p, cand);
    d.stable = is_stable(p, cand);
    try {
      d.orientation = orientation_sign(p, cand);
    } catch (const PegError&) {
      rep.undecided.push_back(cand);
      continue;
    }
    (d.orientation == Orientation::Positive ? rep.positive : rep.negative)
        .push_back(d);
  }

  auto dedupe_sort = [&](std::vector<Diameter>& v) {
    std::sort(v.begin(), v.end(), [](const Diameter& a, const Diameter& b) {
      if (a.length != b.length) return a.length < b.length;
      if (a.q1.s != b.q1.s) return a.q1.s < b.q1.s;
      return a.q2.s < b.q2.s;
    });
    v.erase(std::unique(v.begin(), v.end(),
                        [&](const Diameter& a, const Diameter& b) {
                          return std::abs(a.q1.s - b.q1.s) <= eps &&
                                 std::abs(a.q2.s - b.q2.s) <= eps;
                        }),
            v.end());
  };
  dedupe_sort(rep.positive);
  dedupe_sort(rep.negative);
  return rep;
}

std::vector<Diameter> positive_diameters(const Polygon& p) {
  return analyze_diameters(p).positive;
}

int delta_plus(const Polygon& p) { return analyze_diameters(p).delta_plus(); }

}  // namespace pegtrace
