#pragma once

// The hyperbolic plane inside X: H = SO(F)° for F(x,y,z) = 2xz - y²,
// Y = H·o, and the Klein disk model D = {[x:y:z] : y² < 2xz} with the
// affine section x + z = 1.

#include "slx/symspace.hpp"

namespace slx {

struct HElt {
  Mat3 m;
  // Validates m^T J m = J, det = 1, and membership in the identity component
  // (the positive nappe of the form's cone is preserved).
  static HElt checked(const Mat3& m, double tol = 1e-9);
  GroupElt group() const { return GroupElt{m}; }
};

struct DiskPoint {
  double x, y, z; // x + z = 1, y² < 2xz
  static DiskPoint checked(const Vec3& projective, double tol = 1e-12);
  Vec3 vec() const { return {{x, y, z}}; }
};

// Boundary circle of D, parametrized by angle: b(θ) = k(θ)·[e₁].
Vec3 boundary_vector(double theta);
double boundary_angle(const Vec3& projective); // inverse of the above, in [0, 2π)

struct GeodesicY {
  HElt h; // L = h·A₀·o, h unique up to right A₀ factors
  double forward_angle() const;  // endpoint h·[e₁]
  double backward_angle() const; // endpoint h·[e₃]
};

struct BruhatCoords {
  double n_plus;  // upper unipotent parameter
  double n_minus; // lower unipotent parameter
  double a;       // A₀ parameter
};

struct HConstants {
  Mat3 J;   // form matrix, 2xz - y²
  Mat3 k0;  // quarter turn, equals k(−π/2)
  Mat3 k1;  // involution conjugating the diagonal into B
  Mat3 g3;  // diag(1,−1,−1)
  Mat3 w0;  // long Weyl element normalizing A₀
};

const HConstants& constants();

HElt h_s(double s);
HElt k_theta(double theta);
GroupElt a_t(double t); // diag(e^t, e^−2t, e^t), the flat direction orthogonal to Y

DiskPoint disk_basepoint(); // o ↔ [1:0:1]
DiskPoint disk_act(const HElt& h, const DiskPoint& p);
DiskPoint disk_of(const SymPoint& y); // for points on Y (see hbk.project for general x)

// Hilbert (cross-ratio) distance on D, rescaled once so it matches the
// ambient distance restricted to Y. hyperbolic_distance is the unscaled
// curvature −1 metric (the one critical exponents are measured in).
double klein_distance(const DiskPoint& p, const DiskPoint& q);
double hyperbolic_distance(const DiskPoint& p, const DiskPoint& q);
double klein_calibration(); // klein = calibration * hyperbolic

// Translation by `length` (in klein_distance units) along the oriented axis
// from the repelling to the attracting boundary point.
HElt hyperbolic_elt(double attracting_angle, double repelling_angle, double length);

// n⁺(x) = exp of the upper nilpotent direction of 𝔥, n⁻(y) the lower one.
Mat3 n_plus(double x);
Mat3 n_minus(double y);

// Coordinates of h in the chart h₀·N₀⁺N₀⁻A₀ (open dense in H).
BruhatCoords bruhat_coords(const HElt& h, const HElt& h0);

// Flags of the limit circle Λ_Y: boundary point with its tangent line.
Flag lambda_Y_flag(double theta);

} // namespace slx
