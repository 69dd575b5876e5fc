#ifndef PEGTRACE_DIAMETERS_HPP
#define PEGTRACE_DIAMETERS_HPP

#include <optional>
#include <vector>

#include "pegtrace/geometry.hpp"

namespace pegtrace {

enum class EndpointKind { Vertex, EdgeInterior };
enum class Orientation { Positive, Negative };
enum class Extremum { Min, Max, Saddle, Flat };

struct ChordEndpoint {
  Point p;
  double s = 0.0;      // boundary parameter
  EndpointKind kind = EndpointKind::Vertex;
  int index = -1;      // vertex index or edge index
};

struct ChordCandidate {
  ChordEndpoint q1, q2;  // q1.s < q2.s
  bool degenerate_family = false;  // parallel-edge interior-interior chord
};

struct Diameter {
  ChordEndpoint q1, q2;
  Orientation orientation = Orientation::Positive;
  Extremum extremum = Extremum::Max;
  bool stable = false;
  bool tricky = false;
  double length = 0.0;
};

struct DiameterReport {
  std::vector<Diameter> positive;
  std::vector<Diameter> negative;
  std::vector<ChordCandidate> degenerate_families;
  std::vector<ChordCandidate> undecided;  // ambiguous tangency / tie breaks
  bool has_tricky() const;
  int delta_plus() const { return static_cast<int>(positive.size()); }
};

// All chords that can be critical for the boundary distance function:
// vertex-vertex pairs, vertex-to-edge perpendicular feet, and one
// representative per parallel edge pair (flagged as a degenerate family).
// Chords crossing the exterior are discarded.
std::vector<ChordCandidate> enumerate_candidates(const Polygon& p);

// Local non-separation test at both endpoints. Throws AmbiguousTangency when
// a branch is perpendicular to the chord at a vertex endpoint.
bool is_diameter(const Polygon& p, const ChordCandidate& chord);

// Left/right agreement of the two boundary arcs at the endpoints.
// Requires is_diameter; throws TieBreakFailure on parallel branches.
Orientation orientation_sign(const Polygon& p, const ChordCandidate& chord);

Extremum classify_extremum(const Polygon& p, const ChordCandidate& chord);

bool is_tricky(const Polygon& p, const ChordCandidate& chord);
bool is_stable(const Polygon& p, const ChordCandidate& chord);

DiameterReport analyze_diameters(const Polygon& p);
std::vector<Diameter> positive_diameters(const Polygon& p);
int delta_plus(const Polygon& p);

}  // namespace pegtrace

#endif
