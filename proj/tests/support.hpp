#ifndef PEGTRACE_TESTS_SUPPORT_HPP
#define PEGTRACE_TESTS_SUPPORT_HPP

#include <cstdint>
#include <vector>

#include "pegtrace/geometry.hpp"

namespace pegtest {

using pegtrace::Point;
using pegtrace::Polygon;

// The obtuse triangle used as ground truth throughout: one long-side diameter
// and one altitude diameter, a single closed-form rectangle family.
inline Polygon obtuse_triangle() {
  return Polygon::validate({{0, 0}, {4, 0}, {1, 1}});
}

// Closed-form rectangle family of the obtuse triangle, h in [0, 1].
inline pegtrace::LabeledRectangle obtuse_family(double h) {
  return pegtrace::LabeledRectangle::from_vertices(
      {h, 0}, {4 - 3 * h, 0}, {4 - 3 * h, h}, {h, h});
}

inline Polygon unit_square() {
  return Polygon::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

inline Polygon right_triangle() {
  return Polygon::validate({{0, 0}, {4, 0}, {0, 3}});
}

// Deterministic 64-bit generator (splitmix64) for test fixtures.
struct TestRng {
  uint64_t state;
  explicit TestRng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

}  // namespace pegtest

#endif
