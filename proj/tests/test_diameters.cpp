#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pegtrace/diameters.hpp"
#include "support.hpp"

using namespace pegtrace;

namespace {

// Independent check: critical chords of the squared endpoint distance,
// detected on a boundary parameter grid with analytic one-sided derivatives.
// Returns chords (s1, s2) clustered to cell resolution.
std::vector<std::pair<double, double>> grid_critical_chords(const Polygon& p,
                                                            int cells) {
  const double step = p.perimeter() / cells;
  auto deriv = [&](double s_self, double s_other) {
    const Point a = p.boundary_point(s_self);
    const Point b = p.boundary_point(s_other);
    const int e = p.edge_index_at(p.wrap(s_self));
    return dot(a - b, p.edges()[static_cast<size_t>(e)].dir);
  };
  auto inside = [&](const Point& a, const Point& b) {
    for (int k = 1; k < 16; ++k) {
      if (!p.contains(a + (b - a) * (k / 16.0))) return false;
    }
    return true;
  };

  std::vector<std::pair<double, double>> found;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double s1 = (i + 0.5) * step;
      const double s2 = (j + 0.5) * step;
      const double gap = std::min(p.wrap(s2 - s1), p.wrap(s1 - s2));
      // Short chords hugging a convex corner mimic criticality at grid
      // resolution; true diameters are polygon-scale.
      if (gap < 20 * step) continue;
      if (distance(p.boundary_point(s1), p.boundary_point(s2)) < 20 * step)
        continue;
      const double g1a = deriv(s1 - 0.55 * step, s2);
      const double g1b = deriv(s1 + 0.55 * step, s2);
      const double g2a = deriv(s2 - 0.55 * step, s1);
      const double g2b = deriv(s2 + 0.55 * step, s1);
      if ((g1a > 0) == (g1b > 0) || (g2a > 0) == (g2b > 0)) continue;
      if (!inside(p.boundary_point(s1), p.boundary_point(s2))) continue;
      found.emplace_back(s1, s2);
    }
  }
  // Cluster to representatives.
  std::vector<std::pair<double, double>> reps;
  for (const auto& f : found) {
    bool close = false;
    for (const auto& r : reps) {
      const double d1 = std::min(p.wrap(f.first - r.first), p.wrap(r.first - f.first));
      const double d2 = std::min(p.wrap(f.second - r.second), p.wrap(r.second - f.second));
      if (d1 <= 2.5 * step && d2 <= 2.5 * step) {
        close = true;
        break;
      }
    }
    if (!close) reps.push_back(f);
  }
  return reps;
}

bool matches_some_diameter(const Polygon& p, const DiameterReport& rep,
                           double s1, double s2, double tol) {
  auto near = [&](double a, double b) {
    const double d = std::min(p.wrap(a - b), p.wrap(b - a));
    return d <= tol;
  };
  auto check = [&](const ChordEndpoint& q1, const ChordEndpoint& q2) {
    return (near(q1.s, s1) && near(q2.s, s2)) ||
           (near(q1.s, s2) && near(q2.s, s1));
  };
  for (const Diameter& d : rep.positive) {
    if (check(d.q1, d.q2)) return true;
  }
  for (const Diameter& d : rep.negative) {
    if (check(d.q1, d.q2)) return true;
  }
  for (const ChordCandidate& c : rep.undecided) {
    if (check(c.q1, c.q2)) return true;
  }
  for (const ChordCandidate& c : rep.degenerate_families) {
    if (check(c.q1, c.q2)) return true;
  }
  return false;
}

// No two edges parallel; reflex vertex at (2, 2.1), convex dip at (2, 0.9).
Polygon notched_hexagon() {
  return Polygon::validate(
      {{0, 1.4}, {2, 0.9}, {4, 1.5}, {4.2, 3.05}, {2, 2.1}, {-0.15, 3.1}});
}

}  // namespace

TEST_CASE("obtuse triangle: candidates include sides and the altitude foot") {
  const Polygon p = pegtest::obtuse_triangle();
  const auto cands = enumerate_candidates(p);
  // 3 vertex pairs plus the foot chord from (1,1) down to (1,0).
  CHECK(cands.size() == 4);
  bool have_foot = false;
  for (const auto& c : cands) {
    if (c.q1.kind == EndpointKind::EdgeInterior ||
        c.q2.kind == EndpointKind::EdgeInterior) {
      const ChordEndpoint& foot =
          c.q1.kind == EndpointKind::EdgeInterior ? c.q1 : c.q2;
      CHECK(foot.p.x == doctest::Approx(1.0));
      CHECK(foot.p.y == doctest::Approx(0.0));
      have_foot = true;
    }
  }
  CHECK(have_foot);
}

TEST_CASE("obtuse triangle: long side is a Max diameter, short side is not") {
  const Polygon p = pegtest::obtuse_triangle();
  const auto cands = enumerate_candidates(p);
  for (const auto& c : cands) {
    const bool is_long_side =
        distance(c.q1.p, c.q2.p) == doctest::Approx(4.0).epsilon(1e-12);
    const bool is_altitude =
        std::abs(distance(c.q1.p, c.q2.p) - 1.0) <= 1e-12 &&
        (c.q1.kind == EndpointKind::EdgeInterior ||
         c.q2.kind == EndpointKind::EdgeInterior);
    if (c.degenerate_family) continue;
    const bool dia = is_diameter(p, c);
    if (is_long_side) {
      CHECK(dia);
      CHECK(classify_extremum(p, c) == Extremum::Max);
      CHECK(orientation_sign(p, c) == Orientation::Positive);
      CHECK_FALSE(is_tricky(p, c));
      CHECK(is_stable(p, c));
    } else if (is_altitude) {
      CHECK(dia);
      CHECK(classify_extremum(p, c) == Extremum::Flat);
      CHECK(orientation_sign(p, c) == Orientation::Positive);
    } else {
      CHECK_FALSE(dia);
    }
  }
}

TEST_CASE("obtuse triangle has delta_plus 2") {
  const Polygon p = pegtest::obtuse_triangle();
  const DiameterReport rep = analyze_diameters(p);
  CHECK(rep.delta_plus() == 2);
  CHECK(rep.negative.empty());
  CHECK(rep.degenerate_families.empty());
  CHECK_FALSE(rep.has_tricky());
}

TEST_CASE("right triangle legs are tricky diameters") {
  const Polygon p = pegtest::right_triangle();
  const DiameterReport rep = analyze_diameters(p);
  CHECK(rep.has_tricky());
  int tricky_count = 0;
  for (const Diameter& d : rep.positive) tricky_count += d.tricky;
  for (const Diameter& d : rep.negative) tricky_count += d.tricky;
  CHECK(tricky_count == 2);
  // The legs specifically.
  bool leg1 = false, leg2 = false;
  auto is_pt = [](const Point& a, double x, double y) {
    return std::abs(a.x - x) < 1e-12 && std::abs(a.y - y) < 1e-12;
  };
  for (const Diameter& d : rep.positive) {
    if (!d.tricky) continue;
    if ((is_pt(d.q1.p, 0, 0) && is_pt(d.q2.p, 4, 0)) ||
        (is_pt(d.q2.p, 0, 0) && is_pt(d.q1.p, 4, 0)))
      leg1 = true;
    if ((is_pt(d.q1.p, 0, 0) && is_pt(d.q2.p, 0, 3)) ||
        (is_pt(d.q2.p, 0, 0) && is_pt(d.q1.p, 0, 3)))
      leg2 = true;
  }
  CHECK(leg1);
  CHECK(leg2);
}

TEST_CASE("unit square: degenerate parallel families, tricky sides") {
  const Polygon p = pegtest::unit_square();
  const DiameterReport rep = analyze_diameters(p);
  CHECK(rep.degenerate_families.size() == 2);
  CHECK(rep.has_tricky());
}

TEST_CASE("parallel-edge chords are not stable") {
  const Polygon p = pegtest::unit_square();
  for (const auto& c : enumerate_candidates(p)) {
    if (c.degenerate_family) CHECK_FALSE(is_stable(p, c));
  }
}

TEST_CASE("notched hexagon has a positive saddle diameter") {
  const Polygon p = notched_hexagon();
  const DiameterReport rep = analyze_diameters(p);
  bool saddle = false;
  for (const Diameter& d : rep.positive) {
    if (d.extremum == Extremum::Saddle) {
      saddle = true;
      // The neck chord between the two notch vertices.
      CHECK(d.length == doctest::Approx(1.2));
    }
  }
  CHECK(saddle);
}

TEST_CASE("grid criticality oracle agrees with the enumeration") {
  for (const Polygon& p : {pegtest::obtuse_triangle(), notched_hexagon()}) {
    const DiameterReport rep = analyze_diameters(p);
    const int cells = 700;
    const auto reps = grid_critical_chords(p, cells);
    const double tol = 3.0 * p.perimeter() / cells;
    for (const auto& [s1, s2] : reps) {
      CHECK(matches_some_diameter(p, rep, s1, s2, tol));
    }
    // Conversely every strict diameter shows up as a critical cluster.
    // Tricky ones are tangential and invisible to a sign-flip test.
    int total = 0;
    int matched = 0;
    for (const auto* list : {&rep.positive, &rep.negative}) {
      for (const Diameter& d : *list) {
        if (d.tricky) continue;
        ++total;
        for (const auto& [s1, s2] : reps) {
          auto near = [&](double a, double b) {
            return std::min(p.wrap(a - b), p.wrap(b - a)) <= tol;
          };
          if ((near(d.q1.s, s1) && near(d.q2.s, s2)) ||
              (near(d.q1.s, s2) && near(d.q2.s, s1))) {
            ++matched;
            break;
          }
        }
      }
    }
    CHECK(matched == total);
  }
}

TEST_CASE("rigid motions permute diameters and preserve flags") {
  const Polygon p = notched_hexagon();
  const DiameterReport rep = analyze_diameters(p);

  const double ang = 0.83;
  const Vec2 shift{3.7, -1.9};
  std::vector<Point> moved;
  for (const Point& v : p.vertices()) {
    moved.push_back({v.x * std::cos(ang) - v.y * std::sin(ang) + shift.x,
                     v.x * std::sin(ang) + v.y * std::cos(ang) + shift.y});
  }
  const DiameterReport rep2 = analyze_diameters(Polygon::validate(moved));

  REQUIRE(rep2.positive.size() == rep.positive.size());
  REQUIRE(rep2.negative.size() == rep.negative.size());
  for (size_t i = 0; i < rep.positive.size(); ++i) {
    CHECK(rep2.positive[i].length ==
          doctest::Approx(rep.positive[i].length).epsilon(1e-12));
    CHECK(rep2.positive[i].extremum == rep.positive[i].extremum);
    CHECK(rep2.positive[i].stable == rep.positive[i].stable);
    CHECK(rep2.positive[i].tricky == rep.positive[i].tricky);
  }
}

TEST_CASE("uniform scaling scales lengths and preserves flags") {
  const Polygon p = notched_hexagon();
  const DiameterReport rep = analyze_diameters(p);
  std::vector<Point> scaled;
  for (const Point& v : p.vertices()) scaled.push_back(v * 3.25);
  const DiameterReport rep2 = analyze_diameters(Polygon::validate(scaled));
  REQUIRE(rep2.positive.size() == rep.positive.size());
  for (size_t i = 0; i < rep.positive.size(); ++i) {
    CHECK(rep2.positive[i].length ==
          doctest::Approx(3.25 * rep.positive[i].length).epsilon(1e-12));
    CHECK(rep2.positive[i].extremum == rep.positive[i].extremum);
  }
}

TEST_CASE("mirror reflection preserves diameter orientations") {
  const Polygon p = pegtest::obtuse_triangle();
  std::vector<Point> mirrored;
  for (const Point& v : p.vertices()) mirrored.push_back({-v.x, v.y});
  const DiameterReport rep = analyze_diameters(Polygon::validate(mirrored));
  CHECK(rep.delta_plus() == 2);
  CHECK(rep.negative.empty());
}

TEST_CASE("convex polygons: the longest vertex chord is a Max diameter") {
  pegtest::TestRng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    // Convex position: sorted angles on a wobbly circle.
    const int n = 5 + static_cast<int>(rng.next() % 4);
    std::vector<double> angs;
    for (int i = 0; i < n; ++i) angs.push_back(rng.uniform(0, 2 * M_PI));
    std::sort(angs.begin(), angs.end());
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      if (angs[(i + 1) % n] - angs[i] < 0.05 && i + 1 < n) ok = false;
    }
    if (!ok) continue;
    std::vector<Point> vs;
    for (double a : angs) vs.push_back({std::cos(a), std::sin(a)});
    Polygon poly = Polygon::validate(vs);

    double best = 0;
    int bi = 0, bj = 0;
    for (int i = 0; i < poly.size(); ++i) {
      for (int j = i + 1; j < poly.size(); ++j) {
        const double d = distance(poly.vertices()[i], poly.vertices()[j]);
        if (d > best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    const DiameterReport drep = analyze_diameters(poly);
    bool found = false;
    for (const auto* list : {&drep.positive, &drep.negative}) {
      for (const Diameter& d : *list) {
        const double m1 = distance(d.q1.p, poly.vertices()[bi]);
        const double m2 = distance(d.q2.p, poly.vertices()[bj]);
        const double m3 = distance(d.q1.p, poly.vertices()[bj]);
        const double m4 = distance(d.q2.p, poly.vertices()[bi]);
        if ((m1 < 1e-9 && m2 < 1e-9) || (m3 < 1e-9 && m4 < 1e-9)) {
          found = true;
          CHECK(d.extremum == Extremum::Max);
        }
      }
    }
    CHECK(found);
  }
}
