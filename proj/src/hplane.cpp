#include "slx/hplane.hpp"

#include <cmath>

#include "slx/error.hpp"

namespace slx {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Mat3 make_J() {
  Mat3 m;
  m.a = {0, 0, 1, 0, -1, 0, 1, 0, 0};
  return m;
}

Mat3 make_k1() {
  Mat3 m;
  m.a = {kInvSqrt2, 0, kInvSqrt2, 0, -1, 0, kInvSqrt2, 0, -kInvSqrt2};
  return m;
}

} // namespace

const HConstants& constants() {
  static const HConstants c = [] {
    HConstants k;
    k.J = make_J();
    k.k0 = k_theta(-kPi / 2.0).m;
    k.k1 = make_k1();
    k.g3 = Mat3::diag(1, -1, -1);
    k.w0 = make_J(); // same matrix realizes the long Weyl element of A₀
    return k;
  }();
  return c;
}

HElt HElt::checked(const Mat3& m, double tol) {
  SLX_REQUIRE(m.finite(), Errc::invalid_argument, "HElt: non-finite matrix");
  const Mat3& J = constants().J;
  double residual = (m.transpose() * J * m - J).norm_fro();
  SLX_REQUIRE(residual <= tol * (1.0 + m.norm_fro()), Errc::invalid_argument,
              "HElt: matrix does not preserve the form");
  SLX_REQUIRE(m.det() > 0.0, Errc::invalid_argument, "HElt: determinant must be +1");
  // Identity component: the nappe of {F > 0} containing (1,0,1) is preserved.
  Vec3 w = m * Vec3{{1, 0, 1}};
  SLX_REQUIRE(w[0] + w[2] > 0.0, Errc::invalid_argument,
              "HElt: matrix lies in the non-identity component");
  return HElt{m};
}

HElt h_s(double s) {
  return HElt{Mat3::diag(std::exp(s), 1.0, std::exp(-s))};
}

HElt k_theta(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m.a = {0.5 * (1 + c), -kInvSqrt2 * s, 0.5 * (1 - c),
         kInvSqrt2 * s,  c,             -kInvSqrt2 * s,
         0.5 * (1 - c),  kInvSqrt2 * s, 0.5 * (1 + c)};
  return HElt{m};
}

GroupElt a_t(double t) {
  return GroupElt{Mat3::diag(std::exp(t), std::exp(-2.0 * t), std::exp(t))};
}

DiskPoint DiskPoint::checked(const Vec3& v, double tol) {
  double s = v[0] + v[2];
  SLX_REQUIRE(std::fabs(s) > 1e-14 * v.norm_inf(), Errc::invalid_argument,
              "DiskPoint: x + z = 0, outside the affine section");
  double x = v[0] / s, y = v[1] / s, z = v[2] / s;
  SLX_REQUIRE(y * y - 2.0 * x * z < -tol, Errc::invalid_argument,
              "DiskPoint: not an interior point of D");
  return DiskPoint{x, y, z};
}

Vec3 boundary_vector(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  return {{0.5 * (1 + c), kInvSqrt2 * s, 0.5 * (1 - c)}};
}

double boundary_angle(const Vec3& v) {
  double s = v[0] + v[2];
  SLX_REQUIRE(std::fabs(s) > 1e-14 * v.norm_inf(), Errc::invalid_argument,
              "boundary_angle: x + z = 0");
  double x = v[0] / s, y = v[1] / s;
  double a = std::atan2(std::sqrt(2.0) * y, 2.0 * x - 1.0);
  return a < 0 ? a + 2.0 * kPi : a;
}

double GeodesicY::forward_angle() const { return boundary_angle(h.m.col(0)); }
double GeodesicY::backward_angle() const { return boundary_angle(h.m.col(2)); }

DiskPoint disk_basepoint() { return DiskPoint{0.5, 0.0, 0.5}; }

DiskPoint disk_act(const HElt& h, const DiskPoint& p) {
  return DiskPoint::checked(h.m * p.vec());
}

DiskPoint disk_of(const SymPoint& y) {
  // On Y = H·o the H-equivariant identification sends h·o to h·[1:0:1].
  // g = sqrt(y) lands in H up to right K₀ factors, which fix [1:0:1], so the
  // square root works whenever y really lies on Y.
  Mat3 g = sqrt_spd(y.x);
  Vec3 v = g * Vec3{{1, 0, 1}} * 0.5;
  return DiskPoint::checked(v, 1e-9);
}

namespace {

double hilbert_raw(const DiskPoint& p, const DiskPoint& q) {
  if (std::fabs(p.x - q.x) < 1e-16 && std::fabs(p.y - q.y) < 1e-16) return 0.0;
  // Affine chart (x, y), z = 1 - x; the boundary conic is y² = 2x(1-x).
  // Solve the line p + t(q - p) against the conic; p sits at t = 0, q at 1.
  double dx = q.x - p.x, dy = q.y - p.y;
  double A = dy * dy + 2.0 * dx * dx;
  double B = 2.0 * p.y * dy - 2.0 * dx + 4.0 * p.x * dx;
  double C = p.y * p.y - 2.0 * p.x * (1.0 - p.x);
  double disc = B * B - 4.0 * A * C;
  SLX_REQUIRE(disc > 0.0 && A > 0.0, Errc::numeric_failure,
              "hilbert distance: chord does not meet the boundary twice");
  double r = std::sqrt(disc);
  double t1 = (-B - r) / (2.0 * A);
  double t2 = (-B + r) / (2.0 * A);
  SLX_REQUIRE(t1 < 0.0 && t2 > 1.0, Errc::numeric_failure,
              "hilbert distance: endpoints not separated by the segment");
  double cross = ((1.0 - t1) * t2) / ((-t1) * (t2 - 1.0));
  return 0.5 * std::log(cross);
}

} // namespace

double hyperbolic_distance(const DiskPoint& p, const DiskPoint& q) { return hilbert_raw(p, q); }

double klein_calibration() {
  static const double c = [] {
    DiskPoint o = disk_basepoint();
    DiskPoint p = disk_act(h_s(1.0), o);
    double hil = hilbert_raw(o, p);
    double amb = distance(SymPoint::basepoint(), SymPoint::orbit(h_s(1.0).group()));
    return amb / hil;
  }();
  return c;
}

double klein_distance(const DiskPoint& p, const DiskPoint& q) {
  return klein_calibration() * hilbert_raw(p, q);
}

HElt hyperbolic_elt(double attracting_angle, double repelling_angle, double length) {
  SLX_REQUIRE(length > 0.0, Errc::invalid_argument, "hyperbolic_elt: length must be positive");
  Vec3 v1 = boundary_vector(attracting_angle);
  Vec3 v2 = boundary_vector(repelling_angle);
  const Mat3& J = constants().J;

  double pairing = v1.dot(J * v2);
  SLX_REQUIRE(std::fabs(pairing) > 1e-9, Errc::invalid_argument,
              "hyperbolic_elt: endpoints coincide");
  v2 = v2 * (1.0 / pairing);

  // Complete (v1, v2) to a hyperbolic basis: w is J-orthogonal to both with
  // w^T J w = -1, which forces the frame into SO(F) after a det fix.
  Vec3 w = J * v1.cross(v2);
  double ww = w.dot(J * w);
  SLX_REQUIRE(ww < 0.0, Errc::numeric_failure, "hyperbolic_elt: degenerate middle vector");
  w = w * (1.0 / std::sqrt(-ww));

  Mat3 f = Mat3::from_cols(v1, w, v2);
  if (f.det() < 0.0) f.set_col(1, -w);

  double s = length / klein_calibration();
  Mat3 out = f * h_s(s).m * f.inverse();
  return HElt::checked(out, 1e-8);
}

Mat3 n_plus(double x) {
  Mat3 m = Mat3::identity();
  m(0, 1) = x;
  m(1, 2) = x;
  m(0, 2) = 0.5 * x * x;
  return m;
}

Mat3 n_minus(double y) {
  Mat3 m = Mat3::identity();
  m(1, 0) = y;
  m(2, 1) = y;
  m(2, 0) = 0.5 * y * y;
  return m;
}

BruhatCoords bruhat_coords(const HElt& h, const HElt& h0) {
  Mat3 m = h0.m.inverse() * h.m;
  // m = n⁺(x)·n⁻(y)·diag(e^a,1,e^−a): the bottom row reads (y²e^a/2, y, e^−a).
  double m33 = m(2, 2);
  SLX_REQUIRE(m33 > 1e-9, Errc::chart_miss, "bruhat_coords: point outside the chart");
  double a = -std::log(m33);
  double y = m(2, 1);
  Mat3 u = m * Mat3::diag(std::exp(-a), 1.0, std::exp(a)) * n_minus(y).inverse();
  double x = u(1, 2);
  Mat3 rec = h0.m * n_plus(x) * n_minus(y) * h_s(a).m;
  SLX_REQUIRE((rec - h.m).norm_fro() <= 1e-9 * (1.0 + h.m.norm_fro()), Errc::chart_miss,
              "bruhat_coords: factorization did not close");
  return BruhatCoords{x, y, a};
}

Flag lambda_Y_flag(double theta) {
  Mat3 k = k_theta(theta).m;
  Vec3 p = k.col(0);
  Vec3 l = k.col(0).cross(k.col(1));
  return make_flag(p, l, 1e-9);
}

} // namespace slx
