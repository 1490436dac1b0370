#pragma once

// Schottky subgroups of H acting on the disk D: ping-pong certificates,
// limit sets, critical exponents, and geodesic-closure sampling in the
// quotient, all at sample-cloud resolution.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slx/fracdim.hpp"
#include "slx/hplane.hpp"

namespace slx {

// Closed boundary arc from lo counterclockwise to hi = lo + width,
// width in (0, 2pi).
struct Arc {
  double lo, hi;
  double width() const { return hi - lo; }
  double mid() const;
  bool contains(double theta, double pad = 0.0) const;
};

// One attracting / repelling arc pair per generator, pairwise disjoint.
struct PingPongCert {
  std::vector<Arc> attract;
  std::vector<Arc> repel;
};

enum class TreeKind { free, amalgam, hnn };

// Splitting data carried along so deformations can follow the tree cases:
// amalgam glues factor1 and factor2 over the edge element, hnn extends
// factor1 by the stable letter.
struct TreeStructure {
  TreeKind kind = TreeKind::free;
  std::vector<int> factor1;
  std::vector<int> factor2;
  int edge = -1;
  int stable = -1;
};

struct WordGroupRep {
  std::vector<GroupElt> generators;
  TreeStructure tree;
  std::optional<PingPongCert> ping_pong;
};

struct AxisSpec {
  double attracting;
  double repelling;
  double length; // curvature -1 units, the metric critical exponents use
};

struct BoundarySample {
  std::vector<double> angles;
  int depth = 0;
};

struct QuotientOrbitCloud {
  std::vector<HElt> frames;
  int reduction_radius = 0;
  // indices whose distance minimizer sat on the word-ball boundary, so the
  // reduction may be incomplete
  std::vector<std::size_t> under_reduced;
};

struct CriticalExponent {
  double delta_box;
  double delta_orbit;
  double agreement_gap;
  double box_r2;
  double orbit_r2;
  bool low_confidence; // either fit has r^2 below 0.98
};

struct ChartReport {
  double miss_fraction;
  bool rejected;              // more than half the cloud misses the chart
  double dim_plus[3];         // forward-endpoint projection, three scale windows
  double dim_minus[3];        // backward-endpoint projection
  double stability;           // max spread across windows, both projections
  bool stable;
};

struct AdmissibilityReport {
  std::vector<ChartReport> charts;
};

// Projective action of g on the boundary circle, in angle coordinates.
double boundary_map(const GroupElt& g, double theta);

// Frame of the geodesic with the given endpoints: h with h[e1] at the
// forward angle and h[e3] at the backward angle.
GeodesicY geodesic_between(double forward_angle, double backward_angle);

// Two-generator Schottky group from axis specs. Arcs of equal radius are
// placed around the four fixed points and the ping-pong conditions are
// verified on dense boundary samples; failure to verify is reported as
// not_discrete, never as a silent best guess.
WordGroupRep schottky(const AxisSpec& a1, const AxisSpec& a2);

// Same group with every generator raised to the n-th power; the original
// arcs are kept and the certificate is re-verified.
WordGroupRep power_subgroup(const WordGroupRep& grp, int n);

// Conjugate c . grp . c^{-1} with the arc system pushed forward through c
// and re-verified.
WordGroupRep conjugate(const WordGroupRep& grp, const HElt& c);

// Reduced words grouped by length: shells[0] = {identity}, shells[d] = all
// words of length exactly d in letter order g1, g1^{-1}, g2, g2^{-1}, ...
std::vector<std::vector<GroupElt>> word_shells(const WordGroupRep& grp,
                                               int depth);

// Attracting fixed points of all reduced words of length <= depth, ordered
// by word length then letter order.
BoundarySample limit_set(const WordGroupRep& grp, int depth);

// The nested arc families: level 1 is the certificate arcs, level d+1 the
// images of level-d arcs under the letters that keep words reduced.
std::vector<Arc> arc_system(const WordGroupRep& grp, int depth);

// delta via two independent routes: box dimension of the limit set on the
// circle, and the growth rate of orbit distance counts. Both fits report
// r^2; disagreement between the routes is returned, not hidden.
CriticalExponent critical_exponent(const WordGroupRep& grp);

// Geodesic with endpoints generated by two long random reduced words,
// reproducible from the seed; a practical surrogate for a flow line that is
// dense in the non-wandering set.
GeodesicY dense_geodesic(const WordGroupRep& grp, unsigned seed);

// Flow samples h_L . h_{k step} for k step <= T, each folded toward the
// fundamental domain by greedy letter descent and then polished over the
// word ball of the given radius. Frames whose polish minimizer lies on the
// ball boundary are listed as under-reduced.
QuotientOrbitCloud closure_sample(const WordGroupRep& grp, const GeodesicY& L,
                                  double T, double step, int reduction_radius);

// Box dimension of the cloud in the approximate quotient metric
// d([f],[g]) = min over the word ball of a symmetric frame distance.
DimEstimate closure_dimension(const WordGroupRep& grp,
                              const QuotientOrbitCloud& cloud,
                              const std::vector<double>& scales);

// Per chart: forward and backward endpoint coordinates of each frame in the
// chart decomposition, box-counted over three scale windows spaced by the
// group's own contraction period. A chart missing more than half the cloud
// is rejected; a spread above 0.2 across windows marks instability.
AdmissibilityReport admissibility_check(const WordGroupRep& grp,
                                        const QuotientOrbitCloud& cloud,
                                        const std::vector<HElt>& charts);

std::string boundary_csv(const BoundarySample& sample);
std::string cloud_csv(const QuotientOrbitCloud& cloud);

} // namespace slx
