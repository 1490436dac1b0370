#pragma once

// Fixed-size 3x3 double kernel. Everything is a value type and every routine
// is deterministic: same input bits, same output bits, no global state.

#include <array>
#include <cmath>
#include <cstddef>

namespace slx {

struct Vec3 {
  std::array<double, 3> v{0, 0, 0};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  Vec3 operator+(const Vec3& o) const { return {{v[0] + o[0], v[1] + o[1], v[2] + o[2]}}; }
  Vec3 operator-(const Vec3& o) const { return {{v[0] - o[0], v[1] - o[1], v[2] - o[2]}}; }
  Vec3 operator*(double c) const { return {{v[0] * c, v[1] * c, v[2] * c}}; }
  Vec3 operator-() const { return {{-v[0], -v[1], -v[2]}}; }

  double dot(const Vec3& o) const { return v[0] * o[0] + v[1] * o[1] + v[2] * o[2]; }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm_inf() const;
  Vec3 cross(const Vec3& o) const {
    return {{v[1] * o[2] - v[2] * o[1], v[2] * o[0] - v[0] * o[2], v[0] * o[1] - v[1] * o[0]}};
  }
  Vec3 normalized() const;
  double sum() const { return v[0] + v[1] + v[2]; }
  bool finite() const;
};

struct Mat3 {
  // Row-major: a[3*i + j] is entry (i, j).
  std::array<double, 9> a{0, 0, 0, 0, 0, 0, 0, 0, 0};

  double& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }

  static Mat3 identity();
  static Mat3 zero() { return {}; }
  static Mat3 diag(double x, double y, double z);
  static Mat3 diag(const Vec3& d) { return diag(d[0], d[1], d[2]); }
  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2);
  static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2);

  Vec3 row(std::size_t i) const { return {{a[3 * i], a[3 * i + 1], a[3 * i + 2]}}; }
  Vec3 col(std::size_t j) const { return {{a[j], a[3 + j], a[6 + j]}}; }
  void set_col(std::size_t j, const Vec3& c);

  Mat3 operator+(const Mat3& o) const;
  Mat3 operator-(const Mat3& o) const;
  Mat3 operator*(const Mat3& o) const;
  Mat3 operator*(double c) const;
  Vec3 operator*(const Vec3& x) const;

  Mat3 transpose() const;
  double trace() const { return a[0] + a[4] + a[8]; }
  double det() const;
  Mat3 inverse() const;  // throws numeric_failure when near-singular
  Mat3 cofactor() const; // cof(M) = det(M) * inverse(M)^T, computed directly
  double norm_fro() const;
  double norm_inf() const; // max |entry|
  bool finite() const;
  bool is_symmetric(double tol = 1e-12) const; // relative to 1 + ||M||
  Mat3 symmetrized() const;
};

inline Mat3 operator*(double c, const Mat3& m) { return m * c; }
inline Vec3 operator*(double c, const Vec3& x) { return x * c; }

struct EigSym {
  Vec3 values;  // descending
  Mat3 vectors; // orthonormal columns, vectors.col(i) pairs with values[i]
};

struct Svd3 {
  Mat3 u;
  Vec3 sigma; // descending, nonnegative
  Mat3 v;     // M = u * diag(sigma) * v^T, det(u) = det(v) = +1
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues sorted
// descending; each eigenvector's first component of magnitude above
// 1e-12 * max is made positive so repeated runs agree bit for bit.
EigSym sym_eig(const Mat3& s, double sym_tol = 1e-12);

// Rotation-rotation SVD. Requires det(M) > 0 (all users live in SL(3) or
// SO(3)); with nonnegative descending sigma and det(u) = det(v) = +1 a
// negative determinant admits no such factorization.
Svd3 svd3(const Mat3& m);

// Matrix exponential by scaling-and-squaring of a Taylor sum. Exact enough
// for the argument sizes this library produces (||M|| up to a few hundred).
Mat3 expm(const Mat3& m);

// Principal logarithm of a symmetric positive-definite matrix, via sym_eig.
Mat3 logm_spd(const Mat3& s, double sym_tol = 1e-9);

} // namespace slx
