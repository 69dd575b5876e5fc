#ifndef PEGTRACE_COINCIDENCE_HPP
#define PEGTRACE_COINCIDENCE_HPP

#include <vector>

#include "pegtrace/shape_invariant.hpp"
#include "pegtrace/tracer.hpp"

namespace pegtrace {

// False iff some cyclic relabeling or reversal of b matches a vertexwise.
bool really_distinct(const LabeledRectangle& a, const LabeledRectangle& b,
                     double tol);

struct CurveCrossing {
  int comp_a = 0, comp_b = 0;  // component ids (equal for self-crossings)
  int seg_a = 0, seg_b = 0;    // sample segment indices
  Vec2 z;                      // approximate crossing in the (X, Y) plane
  double angle = 0.0;          // crossing angle, radians
};

// Transversal crossings of the sampled curves, excluding points on the
// coordinate axes (degenerate rectangles).
std::vector<CurveCrossing> curve_intersections(const ShapeCurve& a,
                                               const ShapeCurve& b,
                                               double axis_tol);
std::vector<CurveCrossing> self_intersections(const ShapeCurve& a,
                                              double axis_tol);

struct Participant {
  int component = 0;
  double arclen = 0.0;
  LabeledRectangle rect;
};

struct Coincidence {
  double X = 0.0, Y = 0.0;
  std::vector<Participant> participants;  // really-distinct representatives
  int mu = 0;
  bool low_confidence = false;  // near-tangential crossing
};

// Sharpens a sampled crossing into an exact side-length coincidence by
// damped iteration along the two components' charts. Throws NotConverged or,
// for relabeling artifacts, NotReallyDistinct.
Coincidence refine_coincidence(const Polygon& p,
                               const std::vector<ArcComponent>& comps,
                               const CurveCrossing& crossing,
                               const TraceConfig& cfg);

struct CoincidenceReport {
  std::vector<Coincidence> clusters;
  int M = 0;
  int delta_plus = 0;
  int bound_generic = 0;    // 2 (delta_plus - 2)
  int bound_nontricky = 0;  // ceil((delta_plus - 2) / 16)
  bool pass_generic = false;
  bool pass_nontricky = false;
  int dropped = 0;             // crossings that failed to refine
  int infinite_families = 0;   // degenerate continua, never summed into M
};

// Full coincidence count: all pairwise and self crossings, refined, merged
// by side lengths, with relabelings never inflating the total.
CoincidenceReport count_M(const Polygon& p,
                          const std::vector<ArcComponent>& comps,
                          const TraceConfig& cfg);

// One component per orbit together with its one-shift image; counting over
// this subset must reproduce the full M.
std::vector<ArcComponent> orbit_representatives(
    const std::vector<ArcComponent>& comps);

}  // namespace pegtrace

#endif
