#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pegtrace/geometry.hpp"
#include "support.hpp"

using namespace pegtrace;

TEST_CASE("validate accepts the unit square with area 1") {
  const Polygon p = pegtest::unit_square();
  CHECK(p.size() == 4);
  CHECK(p.area() == doctest::Approx(1.0));
  CHECK(p.perimeter() == doctest::Approx(4.0));
}

TEST_CASE("validate rejects the bowtie as self-intersecting") {
  CHECK_THROWS_WITH_AS(
      Polygon::validate({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
      doctest::Contains("SelfIntersecting"), PegError);
}

TEST_CASE("clockwise input is reversed to counterclockwise") {
  const Polygon p = Polygon::validate({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(p.reversed_on_load());
  CHECK(p.area() == doctest::Approx(1.0));
}

TEST_CASE("validate rejects degenerate inputs specifically") {
  CHECK_THROWS_AS(Polygon::validate({{0, 0}, {1, 0}}), PegError);
  try {
    Polygon::validate({{0, 0}, {1, 0}});
  } catch (const PegError& e) {
    CHECK(e.code() == ErrorCode::TooFewVertices);
  }
  try {
    Polygon::validate({{0, 0}, {0, 0}, {1, 1}});
  } catch (const PegError& e) {
    CHECK(e.code() == ErrorCode::ZeroLengthEdge);
  }
  try {
    Polygon::validate({{0, 0}, {1, 0}, {2, 0}, {1, 1}});
  } catch (const PegError& e) {
    CHECK(e.code() == ErrorCode::CollinearRun);
  }
}

TEST_CASE("validate is idempotent") {
  const Polygon p = pegtest::obtuse_triangle();
  const Polygon q = Polygon::validate(p.vertices());
  REQUIRE(q.size() == p.size());
  for (int i = 0; i < p.size(); ++i) {
    CHECK(q.vertices()[i].x == p.vertices()[i].x);
    CHECK(q.vertices()[i].y == p.vertices()[i].y);
  }
}

TEST_CASE("signed area matches hand shoelace values") {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  std::vector<Point> rev(sq.rbegin(), sq.rend());
  CHECK(signed_area(rev) == doctest::Approx(-1.0));
  const std::vector<Point> tri{{0, 0}, {4, 0}, {1, 1}};
  CHECK(signed_area(tri) == doctest::Approx(2.0));
}

TEST_CASE("signed area negates under reversal for random chains") {
  pegtest::TestRng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Point> chain;
    const int n = 3 + static_cast<int>(rng.next() % 9);
    for (int i = 0; i < n; ++i) {
      chain.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    }
    std::vector<Point> rev(chain.rbegin(), chain.rend());
    CHECK(signed_area(chain) == doctest::Approx(-signed_area(rev)).epsilon(1e-12));
  }
}

TEST_CASE("boundary parametrization round trips") {
  const Polygon p = pegtest::unit_square();
  const Point q = p.boundary_point(0.5);
  CHECK(q.x == doctest::Approx(0.5));
  CHECK(q.y == doctest::Approx(0.0));
  CHECK(p.boundary_param({1.0, 0.25}) == doctest::Approx(1.25));
  CHECK_THROWS_AS(p.boundary_param({0.5, 0.5}), PegError);

  pegtest::TestRng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const double s = rng.uniform(0, p.perimeter());
    const double s2 = p.boundary_param(p.boundary_point(s));
    const double diff = std::abs(p.wrap(s2 - s));
    CHECK(std::min(diff, p.perimeter() - diff) <= 1e-12 * p.perimeter());
  }
}

TEST_CASE("cyclic order accepts monotone and tied parameter quadruples") {
  CHECK(cyclic_order_ok({0.1, 0.3, 0.5, 0.9}, 1.0, 1e-9));
  CHECK_FALSE(cyclic_order_ok({0.1, 0.5, 0.3, 0.9}, 1.0, 1e-9));
  CHECK(cyclic_order_ok({0.2, 0.2, 0.7, 0.7}, 1.0, 1e-9));
  // Either rotational sense is fine.
  CHECK(cyclic_order_ok({0.9, 0.5, 0.3, 0.1}, 1.0, 1e-9));
  // Wrapped monotone.
  CHECK(cyclic_order_ok({0.8, 0.95, 0.1, 0.4}, 1.0, 1e-9));
  CHECK_FALSE(cyclic_order_ok({0.2, 0.7, 0.2, 0.7}, 1.0, 1e-9));
}

TEST_CASE("rectangle invariants hold for the closed-form family") {
  for (double h : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const LabeledRectangle r = pegtest::obtuse_family(h);
    CHECK(rectangle_ok(r));
    CHECK(r.X == doctest::Approx(4 - 4 * h));
    CHECK(r.Y == doctest::Approx(h));
    CHECK(closure_residual(r) <= 1e-9 * (r.X + r.Y + 1));
    CHECK(orthogonality_residual(r) <=
          1e-9 * (r.X + r.Y + 1) * (r.X + r.Y + 1));
  }
}

TEST_CASE("shift relabels cyclically and swaps side lengths") {
  const LabeledRectangle r = pegtest::obtuse_family(0.25);
  const LabeledRectangle s1 = shifted(r, 1);
  CHECK(s1.X == doctest::Approx(r.Y));
  CHECK(s1.Y == doctest::Approx(r.X));
  CHECK(rect_distance(shifted(s1, 3), r) == doctest::Approx(0.0));
  const LabeledRectangle s2 = shifted(r, 2);
  CHECK(s2.X == doctest::Approx(r.X));
  CHECK(s2.Y == doctest::Approx(r.Y));
}

TEST_CASE("gracing check accepts family members and rejects junk") {
  const Polygon p = pegtest::obtuse_triangle();
  CHECK(graces(p, pegtest::obtuse_family(0.5), p.eps_geo()));
  const LabeledRectangle off = LabeledRectangle::from_vertices(
      {0.5, 0.2}, {2.5, 0.2}, {2.5, 0.7}, {0.5, 0.7});
  CHECK_FALSE(graces(p, off, p.eps_geo()));
}
