#include "slx/mat3.hpp"

#include <algorithm>
#include <cmath>

#include "slx/error.hpp"

namespace slx {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::numeric_failure: return "numeric_failure";
    case Errc::no_convergence: return "no_convergence";
    case Errc::chart_miss: return "chart_miss";
    case Errc::near_singular_stratum: return "near_singular_stratum";
    case Errc::degenerate_flag: return "degenerate_flag";
    case Errc::not_discrete: return "not_discrete";
    case Errc::bad_config: return "bad_config";
    case Errc::io_failure: return "io_failure";
    case Errc::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

void fail(Errc c, const std::string& msg) {
  throw Error(c, std::string(errc_name(c)) + ": " + msg);
}

double Vec3::norm_inf() const {
  return std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2])});
}

Vec3 Vec3::normalized() const {
  double n = norm();
  SLX_REQUIRE(n > 0.0, Errc::invalid_argument, "cannot normalize zero vector");
  return *this * (1.0 / n);
}

bool Vec3::finite() const {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

Mat3 Mat3::identity() {
  Mat3 m;
  m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  return m;
}

Mat3 Mat3::diag(double x, double y, double z) {
  Mat3 m;
  m.a = {x, 0, 0, 0, y, 0, 0, 0, z};
  return m;
}

Mat3 Mat3::from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
  Mat3 m;
  m.a = {r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]};
  return m;
}

Mat3 Mat3::from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  Mat3 m;
  m.a = {c0[0], c1[0], c2[0], c0[1], c1[1], c2[1], c0[2], c1[2], c2[2]};
  return m;
}

void Mat3::set_col(std::size_t j, const Vec3& c) {
  a[j] = c[0];
  a[3 + j] = c[1];
  a[6 + j] = c[2];
}

Mat3 Mat3::operator+(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
  return r;
}

Mat3 Mat3::operator-(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r.a[3 * i + j] = a[3 * i] * o.a[j] + a[3 * i + 1] * o.a[3 + j] + a[3 * i + 2] * o.a[6 + j];
  return r;
}

Mat3 Mat3::operator*(double c) const {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = a[i] * c;
  return r;
}

Vec3 Mat3::operator*(const Vec3& x) const {
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r[i] = a[3 * i] * x[0] + a[3 * i + 1] * x[1] + a[3 * i + 2] * x[2];
  return r;
}

Mat3 Mat3::transpose() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.a[3 * i + j] = a[3 * j + i];
  return r;
}

double Mat3::det() const {
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Mat3 Mat3::cofactor() const {
  Mat3 c;
  c.a[0] = a[4] * a[8] - a[5] * a[7];
  c.a[1] = a[5] * a[6] - a[3] * a[8];
  c.a[2] = a[3] * a[7] - a[4] * a[6];
  c.a[3] = a[2] * a[7] - a[1] * a[8];
  c.a[4] = a[0] * a[8] - a[2] * a[6];
  c.a[5] = a[1] * a[6] - a[0] * a[7];
  c.a[6] = a[1] * a[5] - a[2] * a[4];
  c.a[7] = a[2] * a[3] - a[0] * a[5];
  c.a[8] = a[0] * a[4] - a[1] * a[3];
  return c;
}

Mat3 Mat3::inverse() const {
  double d = det();
  double scale = norm_inf();
  SLX_REQUIRE(std::fabs(d) > 1e-300 && std::fabs(d) > 1e-15 * scale * scale * scale,
              Errc::numeric_failure, "matrix numerically singular in inverse()");
  return cofactor().transpose() * (1.0 / d);
}

double Mat3::norm_fro() const {
  double s = 0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

double Mat3::norm_inf() const {
  double m = 0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

bool Mat3::finite() const {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Mat3::is_symmetric(double tol) const {
  double scale = 1.0 + norm_inf();
  return std::fabs(a[1] - a[3]) <= tol * scale && std::fabs(a[2] - a[6]) <= tol * scale &&
         std::fabs(a[5] - a[7]) <= tol * scale;
}

Mat3 Mat3::symmetrized() const { return (*this + transpose()) * 0.5; }

namespace {

// One Jacobi rotation zeroing the (p, q) entry of symmetric A, accumulating
// the rotation into V (A <- J^T A J, V <- V J).
void jacobi_rotate(Mat3& A, Mat3& V, int p, int q) {
  double apq = A(p, q);
  if (apq == 0.0) return;
  double app = A(p, p), aqq = A(q, q);
  double tau = (aqq - app) / (2.0 * apq);
  double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                          : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
  double c = 1.0 / std::sqrt(1.0 + t * t);
  double s = t * c;

  for (int k = 0; k < 3; ++k) {
    double akp = A(k, p), akq = A(k, q);
    A(k, p) = c * akp - s * akq;
    A(k, q) = s * akp + c * akq;
  }
  for (int k = 0; k < 3; ++k) {
    double apk = A(p, k), aqk = A(q, k);
    A(p, k) = c * apk - s * aqk;
    A(q, k) = s * apk + c * aqk;
  }
  A(p, q) = 0.0;
  A(q, p) = 0.0;
  for (int k = 0; k < 3; ++k) {
    double vkp = V(k, p), vkq = V(k, q);
    V(k, p) = c * vkp - s * vkq;
    V(k, q) = s * vkp + c * vkq;
  }
}

double off_diag_norm(const Mat3& A) {
  return std::sqrt(A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2));
}

void sign_fix_column(Mat3& V, int j) {
  Vec3 c = V.col(j);
  double m = c.norm_inf();
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(c[i]) > 1e-12 * m) {
      if (c[i] < 0) V.set_col(j, -c);
      return;
    }
  }
}

} // namespace

EigSym sym_eig(const Mat3& s, double sym_tol) {
  SLX_REQUIRE(s.finite(), Errc::invalid_argument, "sym_eig: non-finite input");
  SLX_REQUIRE(s.is_symmetric(sym_tol), Errc::invalid_argument, "sym_eig: input not symmetric");

  Mat3 A = s.symmetrized();
  Mat3 V = Mat3::identity();
  double scale = A.norm_inf();
  if (scale == 0.0) return {Vec3{{0, 0, 0}}, V};

  // Fixed sweep order, fixed sweep cap: convergence is cubic, 15 sweeps is
  // far beyond what a 3x3 needs.
  for (int sweep = 0; sweep < 15; ++sweep) {
    if (off_diag_norm(A) <= 1e-15 * scale) break;
    jacobi_rotate(A, V, 0, 1);
    jacobi_rotate(A, V, 0, 2);
    jacobi_rotate(A, V, 1, 2);
  }

  std::array<int, 3> idx = {0, 1, 2};
  Vec3 w{{A(0, 0), A(1, 1), A(2, 2)}};
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return w[i] > w[j]; });

  EigSym out;
  Mat3 P;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = w[idx[k]];
    P.set_col(k, V.col(idx[k]));
  }
  for (int k = 0; k < 3; ++k) sign_fix_column(P, k);
  out.vectors = P;
  return out;
}

Svd3 svd3(const Mat3& m) {
  SLX_REQUIRE(m.finite(), Errc::invalid_argument, "svd3: non-finite input");
  double scale = m.norm_inf();
  SLX_REQUIRE(scale > 0.0, Errc::invalid_argument, "svd3: zero matrix");
  double d = m.det();
  SLX_REQUIRE(std::fabs(d) > 1e-14 * scale * scale * scale, Errc::invalid_argument,
              "svd3: singular input");
  SLX_REQUIRE(d > 0.0, Errc::invalid_argument,
              "svd3: negative determinant admits no rotation-rotation SVD");

  // Work on M/scale so M^T M cannot overflow; sigma is rescaled at the end.
  Mat3 Ms = m * (1.0 / scale);
  EigSym e = sym_eig((Ms.transpose() * Ms).symmetrized());

  Mat3 V = e.vectors;
  if (V.det() < 0) V.set_col(2, -V.col(2));

  Vec3 sigma;
  for (int i = 0; i < 3; ++i) sigma[i] = std::sqrt(std::max(e.values[i], 0.0));

  // u_i = M v_i / sigma_i for the well-conditioned columns; the last column
  // comes from the cross product, which also fixes det(U) = +1.
  Vec3 u0 = (Ms * V.col(0)).normalized();
  Vec3 u1 = Ms * V.col(1);
  u1 = u1 - u0 * u0.dot(u1);
  double n1 = u1.norm();
  if (n1 > 1e-12 * sigma[0]) {
    u1 = u1 * (1.0 / n1);
  } else {
    // sigma_2 collapsed relative to sigma_1: pick any unit vector orthogonal
    // to u0, deterministically.
    Vec3 seed = (std::fabs(u0[0]) < 0.9) ? Vec3{{1, 0, 0}} : Vec3{{0, 1, 0}};
    u1 = (seed - u0 * u0.dot(seed)).normalized();
  }
  Vec3 u2 = u0.cross(u1);

  Svd3 out;
  out.u = Mat3::from_cols(u0, u1, u2);
  out.v = V;
  out.sigma = sigma * scale;
  return out;
}

Mat3 expm(const Mat3& m) {
  SLX_REQUIRE(m.finite(), Errc::invalid_argument, "expm: non-finite input");
  double n = m.norm_fro();
  int squarings = 0;
  Mat3 A = m;
  if (n > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(n / 0.25)));
    squarings = std::min(squarings, 60);
    A = m * std::ldexp(1.0, -squarings);
  }

  // Taylor to degree 16; with ||A|| <= 0.25 the tail is below 1e-22.
  Mat3 r = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int k = 1; k <= 16; ++k) {
    term = term * A * (1.0 / k);
    r = r + term;
  }
  for (int i = 0; i < squarings; ++i) r = r * r;
  SLX_REQUIRE(r.finite(), Errc::numeric_failure, "expm: overflow");
  return r;
}

Mat3 logm_spd(const Mat3& s, double sym_tol) {
  EigSym e = sym_eig(s, sym_tol);
  SLX_REQUIRE(e.values[2] > 0.0, Errc::invalid_argument, "logm_spd: input not positive definite");
  Mat3 L = Mat3::diag(std::log(e.values[0]), std::log(e.values[1]), std::log(e.values[2]));
  return (e.vectors * L * e.vectors.transpose()).symmetrized();
}

} // namespace slx
