#ifndef PEGTRACE_TRACER_HPP
#define PEGTRACE_TRACER_HPP

#include <array>
#include <optional>
#include <vector>

#include "pegtrace/chart.hpp"
#include "pegtrace/diameters.hpp"
#include "pegtrace/geometry.hpp"

namespace pegtrace {

enum class ComponentClass { Hyperbolic, NullX, NullY, Loop };
const char* component_class_name(ComponentClass c);

struct TraceConfig {
  // All lengths are relative to the polygon perimeter.
  double h0_rel = 2e-5;             // initial step
  double h_max_rel = 1e-4;          // step cap (rectangle space)
  double corrector_tol_rel = 1e-11; // on-manifold residual
  double eps_deg_rel = 1e-7;        // degeneracy threshold
  double wall_tol_rel = 1e-11;      // wall event location
  int max_steps = 400000;           // per component
  int loop_grid = 12;               // oracle grid for loop seeding; 0 = off

  struct Abs {
    double h0, h_max, corrector_tol, eps_deg, wall_tol;
    int max_steps;
    int loop_grid;
  };
  Abs resolve(double perimeter) const {
    return {h0_rel * perimeter,     h_max_rel * perimeter,
            corrector_tol_rel * perimeter, eps_deg_rel * perimeter,
            wall_tol_rel * perimeter, max_steps, loop_grid};
  }
};

struct TraceSample {
  LabeledRectangle rect;
  Vec3 t{};
  int chart_id = 0;   // index into ArcComponent::inscribing
  double arclen = 0;  // cumulative rectangle-space arc length
};

struct ComponentEndpoint {
  int diameter = -1;  // index into the positive diameter list
  int shift = 0;      // which of the 4 seed labelings of that diameter
};

struct ArcComponent {
  std::vector<TraceSample> samples;
  std::vector<EdgeQuadruple> inscribing;  // run-length compressed
  ComponentClass cls = ComponentClass::Hyperbolic;
  std::optional<ComponentEndpoint> end0, end1;  // empty for loops
  int shift = 0;   // labeling shift of the seeding diameter end
  int orbit = -1;  // orbit id under cyclic relabeling
  bool non_generic = false;

  double length() const {
    return samples.empty() ? 0.0 : samples.back().arclen;
  }
};

// The four degenerate seed labelings of a positive diameter:
// (q1,q1,q2,q2) and its cyclic shifts.
std::array<LabeledRectangle, 4> seed_rectangles(const Diameter& d);

struct SeedStart {
  EdgeQuadruple quad;
  Vec3 t{};
  Vec3 dir{};  // outgoing unit tangent in chart parameters
};

// Viable chart assignments for a degenerate seed rectangle: every candidate
// edge assignment is tested for an in-box, degeneracy-escaping, gracing
// outgoing direction. Throws NoViableChart when none survives.
std::vector<SeedStart> initial_chart(const Polygon& p,
                                     const LabeledRectangle& seed,
                                     const TraceConfig::Abs& cfg);

// Replaces the edge of the quadruple slot whose rectangle vertex reached a
// polygon vertex (side 0: the edge start, side 1: the edge end).
EdgeQuadruple chart_transition(const Polygon& p, const EdgeQuadruple& quad,
                               int slot, int side);

// Predictor-corrector continuation of one component from a seed.
ArcComponent continue_component(const Polygon& p,
                                const std::vector<Diameter>& diameters,
                                const SeedStart& start,
                                const TraceConfig::Abs& cfg);

// Traces every (positive diameter, labeling shift) seed, deduplicates,
// discovers loop components from oracle samples, and tags orbits.
// Throws TrickyDiameter when the polygon has tricky diameters.
std::vector<ArcComponent> trace_all(const Polygon& p, const TraceConfig& cfg);

// Run-length chart sequence with the per-quadruple repeat bound enforced.
std::vector<EdgeQuadruple> inscribing_sequence(const ArcComponent& arc);

// Bidirectional oracle/tracer agreement, used by `trace --check` and the
// acceptance gate.
struct OracleCheck {
  bool forward_ok = true;     // every oracle hit near a traced sample
  double forward_max = 0.0;   // worst hit-to-trace distance
  bool backward_ok = true;    // every traced sample near an oracle hit
  double backward_max = 0.0;
  int hits = 0;
};
OracleCheck oracle_equivalence(const Polygon& p,
                               const std::vector<ArcComponent>& comps,
                               int grid_n, double h_max);

}  // namespace pegtrace

#endif
