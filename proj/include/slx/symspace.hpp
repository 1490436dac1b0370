#pragma once

// The symmetric space X = SL(3,R)/SO(3), realized as unimodular positive
// definite symmetric matrices g*g^T. Distance comes from the Cartan
// projection mu with the plain Euclidean norm on the diagonal subspace, so
// d(o, exp(diag(u))*o) = |u|_2 (in particular d(o, a_t*o) = sqrt(6)*|t|).

#include <vector>

#include "slx/mat3.hpp"

namespace slx {

struct GroupElt {
  Mat3 m;
  // Validating factory; det must be 1 within tol.
  static GroupElt checked(const Mat3& m, double tol = 1e-9);
};

struct SymPoint {
  Mat3 x; // symmetric positive definite, det 1
  static SymPoint checked(const Mat3& x, double tol = 1e-9);
  static SymPoint basepoint();                  // o = identity
  static SymPoint orbit(const GroupElt& g);     // g * g^T
};

// Congruence action x -> g x g^T.
SymPoint act(const GroupElt& g, const SymPoint& x);

// Symmetric square root / inverse square root of a SymPoint.
Mat3 sqrt_spd(const Mat3& x);
Mat3 inv_sqrt_spd(const Mat3& x);

struct CartanFactors {
  GroupElt k_left;  // SO(3)
  Vec3 mu;          // u1 >= u2 >= u3, sum 0
  GroupElt k_right; // SO(3); g = k_left * exp(diag(mu)) * k_right
};

struct Flag {
  Vec3 p; // unit projective point, sign-normalized
  Vec3 l; // unit projective line (covector), sign-normalized, l.p = 0
};

struct RaySpec {
  GroupElt base;  // g
  Vec3 direction; // unit vector in the closed positive chamber, sum 0
  static RaySpec checked(const GroupElt& base, const Vec3& direction, double tol = 1e-10);
};

// mu = (1/2) log spectrum of an SPD matrix with det 1, descending. Computed
// from the top eigenvalue of the matrix and of its cofactor so the small
// entries stay accurate under strong spectral hierarchy.
Vec3 half_log_spectrum(const Mat3& spd);

CartanFactors cartan(const GroupElt& g);

// mu(g) alone, by the hierarchy-robust route (no factors).
Vec3 cartan_mu(const GroupElt& g);

double distance(const SymPoint& x, const SymPoint& y);

// Simple-root gaps (u1 - u2, u2 - u3) of mu(g).
struct AlphaGaps {
  double a1;
  double a2;
};
AlphaGaps alpha_gaps(const GroupElt& g);

enum class Divergence { bounded, regular, uniformly_regular, irregular };

// Finite-sample proxies for the asymptotic definitions; every cutoff is a
// declared config value, there are no hidden thresholds.
struct DivergenceConfig {
  double gap_growth_per_doubling = 1.0; // both gaps must gain this much over the last doubling
  double norm_growth_min = 0.5;         // |mu| gain below this over the last doubling => bounded
  double uniform_floor = 0.02;          // extrapolated min-gap/|mu| ratio must stay above this
  double extrapolation_factor = 16.0;   // ratio fit is pushed to this multiple of the last index
};

Divergence classify_divergence(const std::vector<GroupElt>& samples,
                               const DivergenceConfig& cfg = {});

// Flag of the left Cartan factor: (k e1, k e1 ^ k e2). Defined only when both
// root gaps clear the threshold.
Flag flag_of(const GroupElt& g, double gap_threshold = 2.0);

Flag make_flag(const Vec3& p, const Vec3& l, double tol = 1e-10);

// max of the projective point and line distances; 0 iff equal flags.
double flag_distance(const Flag& f, const Flag& g);

enum class SubCell { none, point_type, line_type };

struct RelPosition {
  int level;    // Schubert stratum 0..3
  SubCell sub;  // which coincidence/incidence fired (levels 1 and 2)
  double margin;   // distance from the nearest decision scalar to the tolerance
  bool unstable;   // margin within one tolerance of the boundary
};

RelPosition relative_position(const Flag& f, const Flag& fp, double tau = 1e-8);

struct BusemannValue {
  double raw;          // d(x, xi_T) - T
  double extrapolated; // Richardson step over T and 2T
};

BusemannValue busemann(const RaySpec& xi, const SymPoint& x, double T = 40.0);

} // namespace slx
