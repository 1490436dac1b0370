#include "slx/symspace.hpp"

#include <algorithm>
#include <cmath>

#include "slx/error.hpp"

namespace slx {

GroupElt GroupElt::checked(const Mat3& m, double tol) {
  SLX_REQUIRE(m.finite(), Errc::invalid_argument, "GroupElt: non-finite matrix");
  SLX_REQUIRE(std::fabs(m.det() - 1.0) <= tol, Errc::invalid_argument,
              "GroupElt: determinant must be 1");
  return GroupElt{m};
}

SymPoint SymPoint::checked(const Mat3& x, double tol) {
  SLX_REQUIRE(x.finite(), Errc::invalid_argument, "SymPoint: non-finite matrix");
  SLX_REQUIRE(x.is_symmetric(1e-10), Errc::invalid_argument, "SymPoint: matrix not symmetric");
  SLX_REQUIRE(std::fabs(x.det() - 1.0) <= tol, Errc::invalid_argument,
              "SymPoint: determinant must be 1");
  EigSym e = sym_eig(x.symmetrized());
  SLX_REQUIRE(e.values[2] > 0.0, Errc::invalid_argument, "SymPoint: matrix not positive definite");
  return SymPoint{x.symmetrized()};
}

SymPoint SymPoint::basepoint() { return SymPoint{Mat3::identity()}; }

SymPoint SymPoint::orbit(const GroupElt& g) {
  return SymPoint{(g.m * g.m.transpose()).symmetrized()};
}

SymPoint act(const GroupElt& g, const SymPoint& x) {
  return SymPoint{(g.m * x.x * g.m.transpose()).symmetrized()};
}

Mat3 sqrt_spd(const Mat3& x) {
  EigSym e = sym_eig(x.symmetrized(), 1e-9);
  SLX_REQUIRE(e.values[2] > 0.0, Errc::invalid_argument, "sqrt_spd: not positive definite");
  Mat3 d = Mat3::diag(std::sqrt(e.values[0]), std::sqrt(e.values[1]), std::sqrt(e.values[2]));
  return (e.vectors * d * e.vectors.transpose()).symmetrized();
}

Mat3 inv_sqrt_spd(const Mat3& x) {
  EigSym e = sym_eig(x.symmetrized(), 1e-9);
  SLX_REQUIRE(e.values[2] > 0.0, Errc::invalid_argument, "inv_sqrt_spd: not positive definite");
  Mat3 d = Mat3::diag(1.0 / std::sqrt(e.values[0]), 1.0 / std::sqrt(e.values[1]),
                      1.0 / std::sqrt(e.values[2]));
  return (e.vectors * d * e.vectors.transpose()).symmetrized();
}

Vec3 half_log_spectrum(const Mat3& spd) {
  double scale = spd.norm_inf();
  SLX_REQUIRE(scale > 0.0 && spd.finite(), Errc::invalid_argument,
              "half_log_spectrum: bad input");
  Mat3 P = spd * (1.0 / scale);

  // lambda_1 and lambda_1 * lambda_2 are both top eigenvalues of SPD
  // matrices (P and cof P), so Jacobi returns them to full relative
  // precision no matter how small lambda_2, lambda_3 are in absolute terms.
  // With det = 1 that pins the whole spectrum.
  EigSym e1 = sym_eig(P, 1e-8);
  SLX_REQUIRE(e1.values[0] > 0.0, Errc::invalid_argument, "half_log_spectrum: not positive");
  EigSym e2 = sym_eig(P.cofactor().symmetrized(), 1e-8);

  double log_scale = std::log(scale);
  double m1 = 0.5 * (std::log(e1.values[0]) + log_scale);
  double m12 = 0.5 * (std::log(e2.values[0]) + 2.0 * log_scale);
  double m2 = m12 - m1;
  double m3 = -m12;

  // Rounding can violate the chamber ordering by O(eps); repair keeps sum 0.
  if (m1 < m2) m1 = m2 = 0.5 * (m1 + m2);
  if (m2 < m3) m2 = m3 = 0.5 * (m2 + m3);
  if (m1 < m2) m1 = m2 = 0.5 * (m1 + m2);
  return {{m1, m2, m3}};
}

Vec3 cartan_mu(const GroupElt& g) {
  // Forming g g^T squares the condition number, so mu_2 is read off the
  // cofactor of g itself: top eigenvalues of Gs Gs^T and cof(Gs) cof(Gs)^T
  // give sigma_1 and sigma_1*sigma_2 at full Jacobi accuracy, and det = 1
  // pins mu_3.
  double f = g.m.norm_inf();
  SLX_REQUIRE(f > 0.0 && g.m.finite(), Errc::invalid_argument, "cartan_mu: bad input");
  Mat3 Gs = g.m * (1.0 / f);
  Mat3 Cs = Gs.cofactor();
  EigSym e1 = sym_eig((Gs * Gs.transpose()).symmetrized(), 1e-8);
  EigSym e2 = sym_eig((Cs * Cs.transpose()).symmetrized(), 1e-8);
  SLX_REQUIRE(e1.values[0] > 0.0 && e2.values[0] > 0.0, Errc::invalid_argument,
              "cartan_mu: degenerate input");
  double lf = std::log(f);
  double m1 = 0.5 * std::log(e1.values[0]) + lf;
  double m12 = 0.5 * std::log(e2.values[0]) + 2.0 * lf;
  double m2 = m12 - m1;
  double m3 = -m12;
  if (m1 < m2) m1 = m2 = 0.5 * (m1 + m2);
  if (m2 < m3) m2 = m3 = 0.5 * (m2 + m3);
  if (m1 < m2) m1 = m2 = 0.5 * (m1 + m2);
  return {{m1, m2, m3}};
}

CartanFactors cartan(const GroupElt& g) {
  Svd3 s = svd3(g.m);
  Vec3 mu = cartan_mu(g);
  return CartanFactors{GroupElt{s.u}, mu, GroupElt{s.v.transpose()}};
}

double distance(const SymPoint& x, const SymPoint& y) {
  Mat3 w = inv_sqrt_spd(x.x);
  Mat3 p = (w * y.x * w).symmetrized();
  return half_log_spectrum(p).norm();
}

AlphaGaps alpha_gaps(const GroupElt& g) {
  Vec3 mu = cartan_mu(g);
  return {mu[0] - mu[1], mu[1] - mu[2]};
}

namespace {

// Least squares line y = a + b*x.
void fit_line(const std::vector<double>& xs, const std::vector<double>& ys, double& a, double& b) {
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (std::fabs(denom) < 1e-14) {
    b = 0;
    a = sy / n;
    return;
  }
  b = (n * sxy - sx * sy) / denom;
  a = (sy - b * sx) / n;
}

} // namespace

Divergence classify_divergence(const std::vector<GroupElt>& samples, const DivergenceConfig& cfg) {
  const std::size_t n = samples.size();
  SLX_REQUIRE(n >= 8, Errc::invalid_argument, "classify_divergence: need at least 8 samples");

  std::vector<double> norms(n), g1(n), g2(n), ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 mu = cartan_mu(samples[i]);
    norms[i] = mu.norm();
    g1[i] = mu[0] - mu[1];
    g2[i] = mu[1] - mu[2];
    ratio[i] = std::min(g1[i], g2[i]) / std::max(norms[i], 1e-12);
  }

  const std::size_t half = n / 2 - 1;
  const std::size_t last = n - 1;

  if (norms[last] - norms[half] < cfg.norm_growth_min) return Divergence::bounded;

  bool gaps_grow = (g1[last] - g1[half] >= cfg.gap_growth_per_doubling) &&
                   (g2[last] - g2[half] >= cfg.gap_growth_per_doubling);
  if (!gaps_grow) return Divergence::irregular;

  // Fit log(min-gap ratio) against log(index) over the tail and extrapolate
  // well past the data; a ratio decaying like a power law drops below the
  // floor, a stabilizing one does not.
  std::vector<double> xs, ys;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (ratio[i] <= 0) return Divergence::regular;
    xs.push_back(std::log(static_cast<double>(i + 1)));
    ys.push_back(std::log(ratio[i]));
  }
  double a = 0, b = 0;
  fit_line(xs, ys, a, b);
  double extrapolated = std::exp(a + b * std::log(static_cast<double>(n) * cfg.extrapolation_factor));
  return extrapolated >= cfg.uniform_floor ? Divergence::uniformly_regular : Divergence::regular;
}

namespace {

Vec3 sign_normalized(const Vec3& v) {
  Vec3 u = v.normalized();
  double m = u.norm_inf();
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(u[i]) > 1e-12 * m) return u[i] < 0 ? -u : u;
  }
  return u;
}

// Projective distance: sine of the angle between the lines spanned.
double proj_dist(const Vec3& u, const Vec3& v) { return u.cross(v).norm(); }

} // namespace

Flag make_flag(const Vec3& p, const Vec3& l, double tol) {
  Vec3 pn = sign_normalized(p);
  Vec3 ln = sign_normalized(l);
  SLX_REQUIRE(std::fabs(pn.dot(ln)) <= tol, Errc::invalid_argument,
              "make_flag: point not incident to line");
  return Flag{pn, ln};
}

Flag flag_of(const GroupElt& g, double gap_threshold) {
  AlphaGaps gaps = alpha_gaps(g);
  SLX_REQUIRE(std::min(gaps.a1, gaps.a2) >= gap_threshold, Errc::degenerate_flag,
              "flag_of: root gap below regularity threshold");
  // Top eigenvector of g g^T is the attracting point; the attracting line's
  // covector is the top eigenvector of cof(g) cof(g)^T. Both stay
  // well-conditioned under strong spectral hierarchy, where a full SVD of g
  // would be rejected as numerically singular.
  double f = g.m.norm_inf();
  Mat3 Gs = g.m * (1.0 / f);
  Mat3 Cs = Gs.cofactor();
  EigSym ep = sym_eig((Gs * Gs.transpose()).symmetrized(), 1e-8);
  EigSym el = sym_eig((Cs * Cs.transpose()).symmetrized(), 1e-8);
  return make_flag(ep.vectors.col(0), el.vectors.col(0), 1e-8);
}

double flag_distance(const Flag& f, const Flag& g) {
  return std::max(proj_dist(f.p, g.p), proj_dist(f.l, g.l));
}

RelPosition relative_position(const Flag& f, const Flag& fp, double tau) {
  double dpp = proj_dist(f.p, fp.p);
  double dll = proj_dist(f.l, fp.l);
  double ipl = std::fabs(fp.l.dot(f.p)); // p on l'?
  double ilp = std::fabs(f.l.dot(fp.p)); // p' on l?

  bool same_point = dpp <= tau;
  bool same_line = dll <= tau;

  RelPosition out{};
  if (same_point && same_line) {
    out.level = 0;
    out.sub = SubCell::none;
  } else if (same_point || same_line) {
    out.level = 1;
    out.sub = same_point ? SubCell::point_type : SubCell::line_type;
  } else if (ipl <= tau || ilp <= tau) {
    out.level = 2;
    out.sub = ipl <= tau ? SubCell::point_type : SubCell::line_type;
  } else {
    out.level = 3;
    out.sub = SubCell::none;
  }
  out.margin = std::min({std::fabs(dpp - tau), std::fabs(dll - tau), std::fabs(ipl - tau),
                         std::fabs(ilp - tau)});
  out.unstable = out.margin <= tau;
  return out;
}

RaySpec RaySpec::checked(const GroupElt& base, const Vec3& direction, double tol) {
  SLX_REQUIRE(direction[0] >= direction[1] - tol && direction[1] >= direction[2] - tol,
              Errc::invalid_argument, "RaySpec: direction not in the closed positive chamber");
  SLX_REQUIRE(std::fabs(direction.sum()) <= tol, Errc::invalid_argument,
              "RaySpec: direction must be traceless");
  SLX_REQUIRE(std::fabs(direction.norm() - 1.0) <= tol, Errc::invalid_argument,
              "RaySpec: direction must be unit length");
  return RaySpec{base, direction};
}

namespace {

SymPoint ray_point(const RaySpec& xi, double t) {
  Mat3 e = Mat3::diag(std::exp(t * xi.direction[0]), std::exp(t * xi.direction[1]),
                      std::exp(t * xi.direction[2]));
  Mat3 g = xi.base.m * e;
  return SymPoint{(g * g.transpose()).symmetrized()};
}

} // namespace

BusemannValue busemann(const RaySpec& xi, const SymPoint& x, double T) {
  SLX_REQUIRE(T > 0.0, Errc::invalid_argument, "busemann: T must be positive");
  double raw = distance(x, ray_point(xi, T)) - T;
  double raw2 = distance(x, ray_point(xi, 2.0 * T)) - 2.0 * T;
  return BusemannValue{raw, 2.0 * raw2 - raw};
}

} // namespace slx
