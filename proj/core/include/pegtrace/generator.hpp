#ifndef PEGTRACE_GENERATOR_HPP
#define PEGTRACE_GENERATOR_HPP

#include <cstdint>
#include <vector>

#include "pegtrace/geometry.hpp"

namespace pegtrace {

struct GeneratorOptions {
  int vertices = 5;
  int count = 1;
  uint64_t seed = 1;
  int attempts_per_polygon = 5000;
};

// Random simple polygons by radial perturbation of a star-shaped base.
// Draws are rejected until validation passes and the diameter structure is
// generic: no parallel edge pairs (within 1e-6 rad), no tricky diameters,
// no undecided orientations. Deterministic per seed; throws
// GenerationBudgetExceeded when the rejection budget runs out.
std::vector<Polygon> generate_polygons(const GeneratorOptions& opt);

}  // namespace pegtrace

#endif
