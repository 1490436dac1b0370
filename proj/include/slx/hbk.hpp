#pragma once

// Generalized Cartan decomposition G = H·W·B⁺·K and the nearest-point
// projection onto Y, plus the floating-plane and boundary-limit machinery
// built on top of it.

#include <string>
#include <vector>

#include "slx/hplane.hpp"
#include "slx/symspace.hpp"

namespace slx {

// exp of [[t,0,s],[0,-2t,0],[s,0,t]]; lies in B⁺ iff s >= 3|t|.
GroupElt exp_B(double t, double s);
bool in_B_plus(double t, double s, double tol = 1e-10);

// Representatives of the double cosets W_{σ,θ}\W_σ inside N_K(𝔟), identity
// first, order fixed by sorted matrix entries. Computed once by enumerating
// the 24 signed permutations conjugated by k₁ and reducing modulo the K₀
// normalizer on the left and the 𝔟-centralizer on the right.
const std::vector<GroupElt>& wyl_reps();

struct HBKFactors {
  HElt h;
  int w_index; // into wyl_reps()
  double b_t, b_s; // B⁺ coordinates
  GroupElt k;
};

// Factor g = h·w·b·k. The form gᵀ·J·g is J-congruent to b̃²-conjugates of J,
// so its eigenvectors recover the columns of h up to slot assignment and
// signs; the search over those finitely many candidates and over wyl_reps()
// is deterministic. Raises near_singular_stratum only when no candidate
// closes the factorization (eigenvalue collisions that keep a valid
// assembly, e.g. points of Y itself, go through with a non-unique h).
HBKFactors hbk_decompose(const GroupElt& g);

// Nearest-point projection X → Y: h·hᵀ for the H-factor of sqrt(x).
SymPoint project(const SymPoint& x);

// Independent check: minimize squared distance over the chart
// (u,v) ↦ h_u·k₀·h_v·o by multistart descent with numeric gradients.
struct OracleResult {
  SymPoint point;
  double u, v;
  double grad_norm;
  int iterations;
};
OracleResult project_oracle(const SymPoint& x);

struct PointCloud {
  std::vector<SymPoint> points;
  std::string provenance;
  double grid_slack = 0.0; // half the max adjacent-sample distance, when grid-based
};

// Sample of the fiber π⁻¹(y) = h·K₀·B·o, covering the B-ball of the given
// radius (fiber-intrinsic radius; the K₀ circle is always fully sampled).
PointCloud fiber_sample(const SymPoint& y, double radius, int n);

struct FloatingPlane {
  GeodesicY L;
  double t;
  GroupElt frame(double u, double v) const; // h·a_t·h_u·k₀·h_v
  SymPoint point(double u, double v) const;
};

struct GridSpec {
  double u0, u1;
  int nu;
  double v0, v1;
  int nv;
};

PointCloud floating_plane_sample(const FloatingPlane& plane, const GridSpec& grid);

// a_t·k₀·h_s, the group part of the curves whose limits fill Λ_{π⁻¹(o)}.
GroupElt gamma(double t, double s);

struct ProfileEntry {
  double s;
  double dist_to_L;
};

// Distance from π(γ_t(s)·o) to L = A₀·o for each s (golden-section over the
// A₀ parameter; the distance along a geodesic is unimodal).
std::vector<ProfileEntry> projection_profile(double t, const std::vector<double>& s_grid);

double distance_to_A0_line(const SymPoint& p); // min over r of d(p, h_r·o)

// θ′ with cot θ′ = −e^{−3c} cot θ, branch picked so that
// k₁⁻¹·k(θ′)·a_c·k(θ)·k₁ is upper triangular with positive diagonal.
double theta_prime(double theta, double c);

struct OrthogonalPlane {
  GeodesicY L;
  GroupElt frame(double u, double v) const; // h·g₃·h_u·k₀·h_v
  SymPoint point(double u, double v) const;
};

OrthogonalPlane orthogonal_plane(const GeodesicY& L);

// Boundary flags of the fiber over o: Λ_{π⁻¹(o)} = ∪_w K₀·k₁·w·P.
Flag fiber_limit_flag(double theta, int w_index);

// min flag-distance from f to Λ_{π⁻¹(o)} (coarse θ scan plus refinement).
double fiber_limit_flag_gap(const Flag& f);

enum class ProductMap {
  gd,   // H × a_t·k₀·A₀·K₀ → G, 5 parameters
  mul2, // h·N₀⁺·A₀ × a_t·k₀·A₀·o → X, 3 parameters
};

struct JacobianQuery {
  ProductMap map;
  double t;
  std::vector<double> params; // 5 for gd, 3 for mul2
  double eps = 1e-4;          // rank cutoff relative to the top singular value
};

int jacobian_rank(const JacobianQuery& q);

} // namespace slx
