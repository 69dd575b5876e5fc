#ifndef PEGTRACE_ORACLE_HPP
#define PEGTRACE_ORACLE_HPP

#include <vector>

#include "pegtrace/geometry.hpp"

namespace pegtrace {

struct OracleHit {
  LabeledRectangle rect;
  double residual = 0.0;  // distance of the fourth vertex to the boundary
  bool refined = false;
};

// Two-point shooting: place R1, R2 at the given boundary parameters, drop the
// common perpendicular to every boundary crossing, and keep near-rectangles.
// Never consults charts.
std::vector<OracleHit> shoot(const Polygon& p, double s1, double s2,
                             double coarse_tol);

// Polishes a near-hit onto the rectangle manifold by damped least-norm
// iteration on the four boundary parameters. Throws NotConverged or
// EdgeAssignmentChanged (a vertex crossed a polygon vertex; re-dispatch).
LabeledRectangle newton_refine(const Polygon& p, const OracleHit& approx);

// Grid sweep over (s1, s2) with n samples per edge; hits refined, deduped by
// vertex proximity and returned in deterministic order.
std::vector<LabeledRectangle> sample_all(const Polygon& p, int grid_n);

}  // namespace pegtrace

#endif
