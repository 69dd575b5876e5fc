#include "pegtrace/generator.hpp"

#include <algorithm>
#include <cmath>

#include "pegtrace/diameters.hpp"

namespace pegtrace {

namespace {

// splitmix64: identical streams on every platform, unlike the standard
// library distributions.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
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

bool generic_enough(const Polygon& p) {
  // Parallel edge pairs poison the rectangle manifold with isometric
  // continua; reject them outright.
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(cross(p.edges()[static_cast<size_t>(i)].dir,
                         p.edges()[static_cast<size_t>(j)].dir)) <= 1e-6) {
        return false;
      }
    }
  }
  const DiameterReport rep = analyze_diameters(p);
  if (rep.has_tricky()) return false;
  if (!rep.undecided.empty()) return false;
  if (!rep.degenerate_families.empty()) return false;
  if (rep.delta_plus() < 2) return false;
  return true;
}

}  // namespace

std::vector<Polygon> generate_polygons(const GeneratorOptions& opt) {
  if (opt.vertices < 3) {
    throw PegError(ErrorCode::InputError, "polygons need at least 3 vertices");
  }
  Rng rng(opt.seed * 0x9E3779B97F4A7C15ull + 0x3C6EF372FE94F82Aull);
  std::vector<Polygon> out;
  int attempts = 0;
  const int budget = opt.attempts_per_polygon * std::max(opt.count, 1);

  while (static_cast<int>(out.size()) < opt.count) {
    if (++attempts > budget) {
      throw PegError(ErrorCode::GenerationBudgetExceeded,
                     "rejection sampling budget exhausted after " +
                         std::to_string(attempts) + " draws");
    }
    const int n = opt.vertices;
    std::vector<double> angs(static_cast<size_t>(n));
    for (double& a : angs) a = rng.uniform(0.0, 2.0 * M_PI);
    std::sort(angs.begin(), angs.end());
    bool spaced = true;
    for (int i = 0; i < n; ++i) {
      const double gap = (i + 1 < n ? angs[static_cast<size_t>(i + 1)]
                                    : angs[0] + 2.0 * M_PI) -
                         angs[static_cast<size_t>(i)];
      if (gap < 0.5 * (2.0 * M_PI / n)) spaced = false;
    }
    if (!spaced) continue;

    std::vector<Point> vs;
    vs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double r = rng.uniform(0.45, 1.0);
      vs.push_back({r * std::cos(angs[static_cast<size_t>(i)]),
                    r * std::sin(angs[static_cast<size_t>(i)])});
    }
    try {
      Polygon p = Polygon::validate(std::move(vs));
      double min_edge = 1e300;
      for (const PolygonEdge& e : p.edges()) min_edge = std::min(min_edge, e.len);
      if (min_edge < 0.05 * p.perimeter() / n) continue;
      if (!generic_enough(p)) continue;
      out.push_back(std::move(p));
    } catch (const PegError&) {
      continue;
    }
  }
  return out;
}

}  // namespace pegtrace
