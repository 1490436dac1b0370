#include "slx/hbk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "slx/error.hpp"
#include "smallsvd.hpp"

namespace slx {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Golden-section minimum of a unimodal function on [lo, hi].
template <typename F>
double golden_min(double lo, double hi, F&& f, int iters, double* argmin = nullptr) {
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    }
  }
  if (argmin) *argmin = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

} // namespace

GroupElt exp_B(double t, double s) {
  double et = std::exp(t);
  Mat3 m = Mat3::zero();
  m(0, 0) = et * std::cosh(s);
  m(0, 2) = et * std::sinh(s);
  m(1, 1) = std::exp(-2.0 * t);
  m(2, 0) = m(0, 2);
  m(2, 2) = m(0, 0);
  return GroupElt{m};
}

bool in_B_plus(double t, double s, double tol) { return s >= 3.0 * std::abs(t) - tol; }

namespace {

// The 24 signed permutation matrices of determinant one: N_K of the diagonal
// subalgebra. Conjugating by k1 turns them into N_K(𝔟).
std::vector<Mat3> signed_perms_det1() {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const int parity[6] = {1, -1, -1, 1, 1, -1};
  std::vector<Mat3> out;
  for (int p = 0; p < 6; ++p) {
    for (int mask = 0; mask < 8; ++mask) {
      int eps[3] = {(mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
      if (parity[p] * eps[0] * eps[1] * eps[2] != 1) continue;
      Mat3 m = Mat3::zero();
      for (int j = 0; j < 3; ++j) m(perms[p][j], j) = eps[j];
      out.push_back(m);
    }
  }
  return out;
}

bool in_K0(const Mat3& m) {
  const auto& cs = constants();
  if ((m.transpose() * (cs.J * m) - cs.J).norm_fro() > 1e-9) return false;
  Vec3 w = m * Vec3{{1.0, 0.0, 1.0}};
  return w[0] + w[2] > 0.0;
}

bool same_double_coset(const Mat3& w, const Mat3& rep, const std::vector<Mat3>& nk0,
                       const std::vector<Mat3>& ck) {
  for (const auto& n : nk0)
    for (const auto& c : ck)
      if ((n * (rep * c) - w).norm_inf() < 1e-9) return true;
  return false;
}

} // namespace

const std::vector<GroupElt>& wyl_reps() {
  static const std::vector<GroupElt> reps = [] {
    const auto& cs = constants();
    std::vector<Mat3> cands;
    for (const auto& p : signed_perms_det1()) cands.push_back(cs.k1 * (p * cs.k1));
    std::sort(cands.begin(), cands.end(), [](const Mat3& a, const Mat3& b) {
      bool aid = (a - Mat3::identity()).norm_inf() < 1e-12;
      bool bid = (b - Mat3::identity()).norm_inf() < 1e-12;
      if (aid != bid) return aid;
      for (int i = 0; i < 9; ++i) {
        double u = std::round(a.a[i] * 1e6), v = std::round(b.a[i] * 1e6);
        if (u != v) return u > v;
      }
      return false;
    });
    std::vector<Mat3> ck; // centralizer of 𝔟 in K
    for (int mask = 0; mask < 8; ++mask) {
      int e0 = (mask & 1) ? -1 : 1, e1 = (mask & 2) ? -1 : 1, e2 = (mask & 4) ? -1 : 1;
      if (e0 * e1 * e2 != 1) continue;
      ck.push_back(cs.k1 * (Mat3::diag(e0, e1, e2) * cs.k1));
    }
    std::vector<Mat3> nk0; // normalizer elements that live in K₀
    for (const auto& c : cands)
      if (in_K0(c)) nk0.push_back(c);
    std::vector<GroupElt> out;
    for (const auto& w : cands) {
      bool dup = false;
      for (const auto& r : out)
        if (same_double_coset(w, r.m, nk0, ck)) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(GroupElt{w});
    }
    return out;
  }();
  return reps;
}

HBKFactors hbk_decompose(const GroupElt& g) {
  SLX_REQUIRE(g.m.finite(), Errc::invalid_argument, "hbk_decompose: non-finite input");
  double scale = g.m.norm_inf();
  SLX_REQUIRE(scale > 0.0 && scale < 1e50, Errc::invalid_argument,
              "hbk_decompose: input out of range");
  const auto& cs = constants();
  const auto& W = wyl_reps();

  // T = g^T J g has the same spectrum as x^{1/2} J x^{1/2} but is formed from
  // g directly, halving the condition number; its eigenvectors z give
  // J-orthonormal columns via c = g z / sqrt|lambda| without any matrix root.
  Mat3 T = (g.m.transpose() * (cs.J * g.m)).symmetrized();
  EigSym es = sym_eig(T);
  // det T = det J = 1, so the smallest-magnitude eigenvalue (which Jacobi
  // only delivers to absolute accuracy) is pinned by the other two.
  {
    int im = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(es.values[i]) < std::abs(es.values[im])) im = i;
    double prod = 1.0;
    for (int i = 0; i < 3; ++i)
      if (i != im) prod *= es.values[i];
    if (prod != 0.0) es.values[im] = 1.0 / prod;
  }
  double lp = es.values[0], ln1 = es.values[1], ln2 = es.values[2];
  SLX_REQUIRE(lp > 0.0 && ln1 < 0.0 && ln2 < 0.0, Errc::numeric_failure,
              "hbk_decompose: g^T J g lost its (1,2) eigenvalue signature");

  auto Bf = [&](const Vec3& u, const Vec3& v) { return u.dot(cs.J * v); };
  // J-orthonormal columns; cell i carries |eigenvalue| as its slot magnitude.
  Vec3 c0 = (g.m * es.vectors.col(0)) * (1.0 / std::sqrt(lp));
  Vec3 c1 = (g.m * es.vectors.col(1)) * (1.0 / std::sqrt(-ln1));
  Vec3 c2 = (g.m * es.vectors.col(2)) * (1.0 / std::sqrt(-ln2));
  // polish to J-orthonormality; exact J-diagonality of the eigenbasis can
  // degrade when the two negative eigenvalues are close
  double b00 = Bf(c0, c0);
  SLX_REQUIRE(b00 > 0.0, Errc::numeric_failure, "hbk_decompose: positive column degenerated");
  c0 = c0 * (1.0 / std::sqrt(b00));
  c1 = c1 - c0 * Bf(c1, c0);
  double b11 = Bf(c1, c1);
  SLX_REQUIRE(b11 < 0.0, Errc::numeric_failure, "hbk_decompose: negative column degenerated");
  c1 = c1 * (1.0 / std::sqrt(-b11));
  c2 = c2 - c0 * Bf(c2, c0) + c1 * Bf(c2, c1);
  double b22 = Bf(c2, c2);
  SLX_REQUIRE(b22 < 0.0, Errc::numeric_failure, "hbk_decompose: negative column degenerated");
  c2 = c2 * (1.0 / std::sqrt(-b22));

  double gnorm = g.m.norm_fro();
  // slot assignments x sign patterns x Weyl representatives, first valid wins
  for (int assign = 0; assign < 2; ++assign) {
    Vec3 colA = c0;
    Vec3 colB = assign == 0 ? c1 : c2;
    Vec3 colC = assign == 0 ? c2 : c1;
    double m0 = lp;
    double m1 = assign == 0 ? -ln1 : -ln2;
    double m2 = assign == 0 ? -ln2 : -ln1;
    Mat3 base = Mat3::from_cols(colA, colB, colC);
    int parity_needed = base.det() > 0.0 ? 0 : 1; // flips must restore det +1
    for (int mask = 0; mask < 8; ++mask) {
      int e0 = (mask & 1) ? -1 : 1, e1 = (mask & 2) ? -1 : 1, e2 = (mask & 4) ? -1 : 1;
      int flips = ((mask & 1) ? 1 : 0) + ((mask & 2) ? 1 : 0) + ((mask & 4) ? 1 : 0);
      if (flips % 2 != parity_needed) continue;
      Mat3 C = Mat3::from_cols(colA * e0, colB * e1, colC * e2);
      Mat3 h = C * cs.k1;
      double hsq = h.norm_fro();
      if ((h.transpose() * (cs.J * h) - cs.J).norm_fro() > 1e-10 * (1.0 + hsq * hsq)) continue;
      Vec3 nappe = h * Vec3{{1.0, 0.0, 1.0}};
      if (!(nappe[0] + nappe[2] > 0.0)) continue;
      if (h.det() < 0.0) continue;
      Mat3 hinv = cs.J * (h.transpose() * cs.J);
      double mm[3] = {m0, m1, m2};
      for (int wi = 0; wi < static_cast<int>(W.size()); ++wi) {
        // k1 w k1 is a signed permutation, so the diagonal conjugate of b is a
        // reordering of the slot magnitudes; reading it off the eigenvalues
        // directly keeps a tiny slot at full relative accuracy instead of
        // reconstituting it by cancellation against the large ones.
        Mat3 P = cs.k1 * (W[wi].m * cs.k1);
        int pi[3];
        for (int j = 0; j < 3; ++j) {
          int im = 0;
          for (int i = 1; i < 3; ++i)
            if (std::abs(P(i, j)) > std::abs(P(im, j))) im = i;
          pi[j] = im;
        }
        double bt = -0.25 * std::log(mm[pi[1]]);
        double bs = 0.25 * (std::log(mm[pi[0]]) - std::log(mm[pi[2]]));
        if (!in_B_plus(bt, bs, 1e-10)) continue;
        Mat3 b = cs.k1 * (Mat3::diag(std::sqrt(mm[pi[0]]), std::sqrt(mm[pi[1]]),
                                     std::sqrt(mm[pi[2]])) *
                          cs.k1);
        // w^T h^{-1} g equals b k with b positive definite, so k is the
        // orthogonal polar factor; inverting b explicitly would amplify noise
        // by the reciprocal of its smallest slot.
        Mat3 bk = W[wi].m.transpose() * (hinv * g.m);
        double ps = bk.norm_inf();
        if (!(bk.det() > 1e-14 * ps * ps * ps)) continue;
        Svd3 pol = svd3(bk);
        Mat3 k = pol.u * pol.v.transpose();
        Mat3 rec = h * (W[wi].m * (b * k));
        if ((rec - g.m).norm_fro() > 1e-8 * (1.0 + gnorm)) continue;
        return HBKFactors{HElt{h}, wi, bt, bs, GroupElt{k}};
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "hbk_decompose: no valid factorization; negative eigenvalue separation %.3e "
                "(input near a lower stratum)",
                std::abs(ln1 - ln2) / std::max(std::abs(ln1), std::abs(ln2)));
  fail(Errc::near_singular_stratum, buf);
}

SymPoint project(const SymPoint& x) {
  HBKFactors f = hbk_decompose(GroupElt{sqrt_spd(x.x)});
  return SymPoint::orbit(f.h.group());
}

OracleResult project_oracle(const SymPoint& x) {
  Mat3 xis = inv_sqrt_spd(x.x);
  const auto& cs = constants();
  auto sqdist = [&](double u, double v) {
    Mat3 y = h_s(u).m * (cs.k0 * h_s(v).m);
    Mat3 p = y * y.transpose();
    Vec3 mu = half_log_spectrum((xis * (p * xis)).symmetrized());
    return mu.dot(mu);
  };
  const double starts[5][2] = {{0, 0}, {1.2, 0}, {-1.2, 0}, {0, 1.2}, {0, -1.2}};
  double bu = 0, bv = 0, bf = std::numeric_limits<double>::infinity();
  double bg = std::numeric_limits<double>::infinity();
  int total_it = 0;
  for (const auto& st : starts) {
    double u = st[0], v = st[1];
    double f0 = sqdist(u, v);
    double gn = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 300; ++it) {
      ++total_it;
      double hu = 1e-6 * (1.0 + std::abs(u)), hv = 1e-6 * (1.0 + std::abs(v));
      double gu = (sqdist(u + hu, v) - sqdist(u - hu, v)) / (2.0 * hu);
      double gv = (sqdist(u, v + hv) - sqdist(u, v - hv)) / (2.0 * hv);
      gn = std::sqrt(gu * gu + gv * gv);
      if (gn <= 1e-8 * (1.0 + f0)) break;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 45; ++bt) {
        double fu = sqdist(u - alpha * gu, v - alpha * gv);
        if (fu <= f0 - 1e-4 * alpha * gn * gn) {
          u -= alpha * gu;
          v -= alpha * gv;
          f0 = fu;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (f0 < bf || (f0 == bf && gn < bg)) {
      bf = f0;
      bg = gn;
      bu = u;
      bv = v;
    }
  }
  SLX_REQUIRE(bg <= 1e-6 * (1.0 + bf), Errc::no_convergence,
              "project_oracle: descent stalled away from a critical point");
  Mat3 y = h_s(bu).m * (cs.k0 * h_s(bv).m);
  return OracleResult{SymPoint::orbit(GroupElt{y}), bu, bv, bg, total_it};
}

PointCloud fiber_sample(const SymPoint& y, double radius, int n) {
  SLX_REQUIRE(n >= 1, Errc::invalid_argument, "fiber_sample: need at least one point");
  SLX_REQUIRE(radius >= 0.0 && std::isfinite(radius), Errc::invalid_argument,
              "fiber_sample: bad radius");
  HBKFactors f = hbk_decompose(GroupElt{sqrt_spd(y.x)});
  double bpart = std::sqrt(6.0 * f.b_t * f.b_t + 2.0 * f.b_s * f.b_s);
  SLX_REQUIRE(bpart <= 1e-8, Errc::invalid_argument, "fiber_sample: base point is not on Y");
  Mat3 h = f.h.m;
  int ntheta = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))));
  int nb = (n + ntheta - 1) / ntheta;
  constexpr double golden = 2.3999632297286533; // angle step filling the disk evenly
  PointCloud out;
  out.points.reserve(n);
  for (int i = 0; i < ntheta && static_cast<int>(out.points.size()) < n; ++i) {
    Mat3 hk = h * k_theta(2.0 * kPi * i / ntheta).m;
    for (int j = 0; j < nb && static_cast<int>(out.points.size()) < n; ++j) {
      double r = radius * std::sqrt((j + 0.5) / nb);
      double bt = r * std::cos(golden * j) / std::sqrt(6.0);
      double bs = r * std::sin(golden * j) / std::sqrt(2.0);
      out.points.push_back(SymPoint::orbit(GroupElt{hk * exp_B(bt, bs).m}));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "fiber(radius=%.6g, n=%d, n_theta=%d, n_b=%d)", radius, n,
                ntheta, nb);
  out.provenance = buf;
  return out;
}

GroupElt FloatingPlane::frame(double u, double v) const {
  const auto& cs = constants();
  return GroupElt{L.h.m * (a_t(t).m * (h_s(u).m * (cs.k0 * h_s(v).m)))};
}

SymPoint FloatingPlane::point(double u, double v) const { return SymPoint::orbit(frame(u, v)); }

PointCloud floating_plane_sample(const FloatingPlane& plane, const GridSpec& grid) {
  SLX_REQUIRE(grid.nu >= 2 && grid.nv >= 2, Errc::invalid_argument,
              "floating_plane_sample: need at least a 2x2 grid");
  SLX_REQUIRE(grid.u1 > grid.u0 && grid.v1 > grid.v0, Errc::invalid_argument,
              "floating_plane_sample: empty grid range");
  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(grid.nu) * grid.nv);
  for (int i = 0; i < grid.nu; ++i) {
    double u = grid.u0 + (grid.u1 - grid.u0) * i / (grid.nu - 1);
    for (int j = 0; j < grid.nv; ++j) {
      double v = grid.v0 + (grid.v1 - grid.v0) * j / (grid.nv - 1);
      out.points.push_back(plane.point(u, v));
    }
  }
  double mesh = 0.0;
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      const SymPoint& p = out.points[static_cast<std::size_t>(i) * grid.nv + j];
      if (i + 1 < grid.nu)
        mesh = std::max(mesh,
                        distance(p, out.points[static_cast<std::size_t>(i + 1) * grid.nv + j]));
      if (j + 1 < grid.nv)
        mesh = std::max(mesh,
                        distance(p, out.points[static_cast<std::size_t>(i) * grid.nv + j + 1]));
    }
  out.grid_slack = 0.5 * mesh;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "floating_plane(t=%.6g, u=[%.4g,%.4g]x%d, v=[%.4g,%.4g]x%d, slack=%.3g)",
                plane.t, grid.u0, grid.u1, grid.nu, grid.v0, grid.v1, grid.nv, out.grid_slack);
  out.provenance = buf;
  return out;
}

GroupElt gamma(double t, double s) {
  const auto& cs = constants();
  return GroupElt{a_t(t).m * (cs.k0 * h_s(s).m)};
}

double distance_to_A0_line(const SymPoint& p) {
  auto f = [&](double r) { return distance(p, SymPoint::orbit(h_s(r).group())); };
  double d0 = distance(p, SymPoint::basepoint());
  double R = std::sqrt(2.0) * d0 + 1.0; // any minimizer satisfies sqrt(2)|r| <= 2 d0
  return golden_min(-R, R, f, 200);
}

std::vector<ProfileEntry> projection_profile(double t, const std::vector<double>& s_grid) {
  std::vector<ProfileEntry> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) {
    // stay in group coordinates: forming gamma*gamma^T first would square the
    // condition number before the decomposition sees it
    HBKFactors f = hbk_decompose(gamma(t, s));
    SymPoint p = SymPoint::orbit(f.h.group());
    out.push_back({s, distance_to_A0_line(p)});
  }
  return out;
}

double theta_prime(double theta, double c) {
  double st = std::sin(theta), ct = std::cos(theta);
  if (st == 0.0) return 0.0;
  // cot(tp) = -e^{-3c} cot(theta); the conjugated product is then upper
  // triangular (its lower block entry cancels exactly), which is what the
  // asymptotic-chamber argument needs.
  double tp = std::atan2(-std::exp(c) * st, std::exp(-2.0 * c) * ct);
  const auto& cs = constants();
  auto q_of = [&](double a) {
    return cs.k1 * (k_theta(a).m * (a_t(c).m * (k_theta(theta).m * cs.k1)));
  };
  Mat3 q = q_of(tp);
  if (q(0, 0) <= 0.0 || q(1, 1) <= 0.0 || q(2, 2) <= 0.0) {
    tp += kPi;
    q = q_of(tp);
  }
  double low = std::max({std::abs(q(1, 0)), std::abs(q(2, 0)), std::abs(q(2, 1)),
                         std::abs(q(0, 1)), std::abs(q(0, 2))});
  SLX_REQUIRE(low <= 1e-9 * (1.0 + q.norm_inf()), Errc::numeric_failure,
              "theta_prime: conjugated product failed to triangularize");
  SLX_REQUIRE(q(0, 0) > 0.0 && q(1, 1) > 0.0 && q(2, 2) > 0.0, Errc::numeric_failure,
              "theta_prime: diagonal not positive on either branch");
  tp = std::fmod(tp, 2.0 * kPi);
  if (tp < 0.0) tp += 2.0 * kPi;
  return tp;
}

GroupElt OrthogonalPlane::frame(double u, double v) const {
  const auto& cs = constants();
  return GroupElt{L.h.m * (cs.g3 * (h_s(u).m * (cs.k0 * h_s(v).m)))};
}

SymPoint OrthogonalPlane::point(double u, double v) const { return SymPoint::orbit(frame(u, v)); }

OrthogonalPlane orthogonal_plane(const GeodesicY& L) { return OrthogonalPlane{L}; }

Flag fiber_limit_flag(double theta, int w_index) {
  const auto& W = wyl_reps();
  SLX_REQUIRE(w_index >= 0 && w_index < static_cast<int>(W.size()), Errc::invalid_argument,
              "fiber_limit_flag: Weyl index out of range");
  const auto& cs = constants();
  Mat3 gmat = k_theta(theta).m * (cs.k1 * W[w_index].m);
  return make_flag(gmat.col(0), gmat.col(0).cross(gmat.col(1)));
}

double fiber_limit_flag_gap(const Flag& f) {
  const auto& W = wyl_reps();
  const int N = 2048;
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  int best_w = 0;
  for (int wi = 0; wi < static_cast<int>(W.size()); ++wi)
    for (int i = 0; i < N; ++i) {
      double th = 2.0 * kPi * i / N;
      double d = flag_distance(f, fiber_limit_flag(th, wi));
      if (d < best) {
        best = d;
        best_theta = th;
        best_w = wi;
      }
    }
  double refined = golden_min(
      best_theta - 4.0 * kPi / N, best_theta + 4.0 * kPi / N,
      [&](double th) { return flag_distance(f, fiber_limit_flag(th, best_w)); }, 80);
  return std::min(best, refined);
}

int jacobian_rank(const JacobianQuery& q) {
  int np = q.map == ProductMap::gd ? 5 : 3;
  SLX_REQUIRE(static_cast<int>(q.params.size()) == np, Errc::invalid_argument,
              "jacobian_rank: wrong parameter count for the chosen map");
  SLX_REQUIRE(q.eps > 0.0, Errc::invalid_argument, "jacobian_rank: eps must be positive");
  const auto& cs = constants();
  auto eval = [&](const std::vector<double>& p) {
    Mat3 out;
    if (q.map == ProductMap::gd) {
      Mat3 xi = Mat3::zero();
      xi(0, 0) = p[0];
      xi(2, 2) = -p[0];
      xi(0, 1) = p[1];
      xi(1, 2) = p[1];
      xi(1, 0) = p[2];
      xi(2, 1) = p[2];
      out = expm(xi) * (a_t(q.t).m * (cs.k0 * (h_s(p[3]).m * k_theta(p[4]).m)));
    } else {
      Mat3 m = n_plus(p[0]) * (h_s(p[1]).m * (a_t(q.t).m * (cs.k0 * h_s(p[2]).m)));
      out = (m * m.transpose()).symmetrized();
    }
    return std::vector<double>(out.a.begin(), out.a.end());
  };
  const double step = 1e-5;
  std::vector<std::vector<double>> cols;
  cols.reserve(np);
  for (int i = 0; i < np; ++i) {
    auto pp = q.params, pm = q.params;
    pp[i] += step;
    pm[i] -= step;
    auto fp = eval(pp), fm = eval(pm);
    std::vector<double> col(9);
    for (int j = 0; j < 9; ++j) col[j] = (fp[j] - fm[j]) / (2.0 * step);
    cols.push_back(std::move(col));
  }
  return detail::numerical_rank(cols, q.eps);
}

} // namespace slx
