#include "slx/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>

#include "slx/error.hpp"
#include "slx/symspace.hpp"

namespace slx {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

double wrap2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  return y < 0.0 ? y + kTwoPi : y;
}

double circ_dist(double a, double b) {
  double d = wrap2pi(a - b);
  return d > kTwoPi - d ? kTwoPi - d : d;
}

// Projective boundary action of a matrix preserving the form cone.
double bmap(const Mat3& m, double theta) {
  return boundary_angle(m * boundary_vector(theta));
}

Mat3 h_inv(const Mat3& m) {
  const Mat3& J = constants().J;
  return J * (m.transpose() * J);
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double vx = 0, vy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
    cxy += (x[i] - mx) * (y[i] - my);
  }
  if (vx <= 0.0 || vy <= 1e-30) return {};
  LineFit f;
  f.slope = cxy / vx;
  f.r2 = std::min(1.0, cxy * cxy / (vx * vy));
  return f;
}

// Letter order g1, g1^{-1}, g2, g2^{-1}, ...; letter ^ 1 is the inverse.
// Inverses via the form identity stay exact even when the entry range of a
// power makes the generic determinant route singular.
std::vector<Mat3> letter_mats(const WordGroupRep& grp) {
  std::vector<Mat3> lm;
  lm.reserve(2 * grp.generators.size());
  for (const GroupElt& g : grp.generators) {
    lm.push_back(g.m);
    lm.push_back(h_inv(g.m));
  }
  return lm;
}

const Arc& arc_of_letter(const PingPongCert& cert, int letter) {
  return letter % 2 == 0 ? cert.attract[letter / 2] : cert.repel[letter / 2];
}

bool arcs_disjoint(const Arc& a, const Arc& b, double pad) {
  return !a.contains(b.lo, pad) && !a.contains(b.hi, pad) &&
         !b.contains(a.lo, pad) && !b.contains(a.hi, pad);
}

// The ping-pong conditions on dense boundary samples: every point outside
// the repelling arc must land inside the attracting arc, and symmetrically
// for the inverse. Failure means the arcs do not prove discreteness.
void verify_cert(const std::vector<Mat3>& lmat, const PingPongCert& cert) {
  std::size_t k = cert.attract.size();
  SLX_REQUIRE(cert.repel.size() == k && lmat.size() == 2 * k,
              Errc::invalid_argument, "ping-pong: malformed certificate");
  std::vector<const Arc*> arcs;
  for (std::size_t i = 0; i < k; ++i) {
    SLX_REQUIRE(cert.attract[i].width() > 0 && cert.attract[i].width() < kTwoPi &&
                    cert.repel[i].width() > 0 && cert.repel[i].width() < kTwoPi,
                Errc::invalid_argument, "ping-pong: degenerate arc");
    arcs.push_back(&cert.attract[i]);
    arcs.push_back(&cert.repel[i]);
  }
  for (std::size_t a = 0; a < arcs.size(); ++a)
    for (std::size_t b = a + 1; b < arcs.size(); ++b)
      SLX_REQUIRE(arcs_disjoint(*arcs[a], *arcs[b], 1e-9), Errc::not_discrete,
                  "ping-pong: arcs overlap");
  const int samples = 256;
  for (std::size_t i = 0; i < k; ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      const Arc& avoid = dir == 0 ? cert.repel[i] : cert.attract[i];
      const Arc& target = dir == 0 ? cert.attract[i] : cert.repel[i];
      const Mat3& g = lmat[2 * i + dir];
      double span = kTwoPi - avoid.width();
      for (int j = 0; j < samples; ++j) {
        double theta = avoid.hi + span * j / (samples - 1);
        SLX_REQUIRE(target.contains(bmap(g, theta), 1e-9), Errc::not_discrete,
                    "ping-pong: generator does not contract into its arc");
      }
    }
  }
}

void require_cert(const WordGroupRep& grp, const char* who) {
  SLX_REQUIRE(grp.ping_pong.has_value() && !grp.generators.empty(),
              Errc::invalid_argument, who);
}

// Reduced words by exact length together with their last letters.
struct ShellData {
  std::vector<std::vector<Mat3>> mats;
  std::vector<std::vector<int>> last;
};

ShellData enumerate_shells(const WordGroupRep& grp, int depth) {
  SLX_REQUIRE(depth >= 0 && depth <= 10, Errc::invalid_argument,
              "word enumeration: depth must be between 0 and 10");
  std::vector<Mat3> lmat = letter_mats(grp);
  ShellData s;
  s.mats.resize(depth + 1);
  s.last.resize(depth + 1);
  s.mats[0] = {Mat3::identity()};
  s.last[0] = {-1};
  for (int d = 1; d <= depth; ++d) {
    for (std::size_t w = 0; w < s.mats[d - 1].size(); ++w)
      for (int l = 0; l < static_cast<int>(lmat.size()); ++l) {
        if (s.last[d - 1][w] == (l ^ 1)) continue;
        s.mats[d].push_back(s.mats[d - 1][w] * lmat[l]);
        s.last[d].push_back(l);
      }
  }
  return s;
}

// Curvature -1 distance from the basepoint to w.o for w in the plane
// stabilizer. The ambient exponents of such a point are (t, 0, -t), so the
// distance is log sigma_1(w). Reading only the top singular value keeps the
// result accurate for long words, whose small singular values drown in
// roundoff long before the top one loses relative precision.
double d_hyp_to_o(const Mat3& w) {
  double f = w.norm_inf();
  SLX_REQUIRE(f > 0.0 && w.finite(), Errc::invalid_argument,
              "orbit distance: bad matrix");
  Mat3 ws = w * (1.0 / f);
  EigSym e = sym_eig((ws * ws.transpose()).symmetrized(), 1e-8);
  SLX_REQUIRE(e.values[0] > 0.0, Errc::numeric_failure,
              "orbit distance: degenerate product");
  return 0.5 * std::log(e.values[0]) + std::log(f);
}

} // namespace

double Arc::mid() const { return wrap2pi(lo + 0.5 * width()); }

bool Arc::contains(double theta, double pad) const {
  double w = wrap2pi(theta - lo);
  return w <= width() + pad || w >= kTwoPi - pad;
}

double boundary_map(const GroupElt& g, double theta) { return bmap(g.m, theta); }

GeodesicY geodesic_between(double forward_angle, double backward_angle) {
  Vec3 bp = boundary_vector(forward_angle);
  Vec3 bm = boundary_vector(backward_angle);
  const Mat3& J = constants().J;
  double beta = bp.dot(J * bm);
  SLX_REQUIRE(beta > 1e-12, Errc::invalid_argument,
              "geodesic_between: endpoints must be distinct");
  double s = 1.0 / std::sqrt(beta);
  Vec3 v = (J * bp).cross(J * bm);
  double q = v.dot(J * v);
  SLX_REQUIRE(q < -1e-15, Errc::numeric_failure,
              "geodesic_between: degenerate endpoint span");
  Vec3 c2 = v * (1.0 / std::sqrt(-q));
  Mat3 h = Mat3::from_cols(bp * s, c2, bm * s);
  if (h.det() < 0.0) h = Mat3::from_cols(bp * s, -c2, bm * s);
  double nf = h.norm_fro();
  return GeodesicY{HElt::checked(h, 1e-9 * (1.0 + nf * nf))};
}

WordGroupRep schottky(const AxisSpec& a1, const AxisSpec& a2) {
  SLX_REQUIRE(a1.length > 0.0 && a2.length > 0.0, Errc::invalid_argument,
              "schottky: translation lengths must be positive");
  double ang[4] = {a1.attracting, a1.repelling, a2.attracting, a2.repelling};
  double gap = kTwoPi;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) gap = std::min(gap, circ_dist(ang[i], ang[j]));
  SLX_REQUIRE(gap > 1e-6, Errc::invalid_argument,
              "schottky: axis endpoints must be pairwise distinct");
  double rho = gap / 2.5;
  double cal = klein_calibration();
  WordGroupRep grp;
  grp.generators = {
      hyperbolic_elt(a1.attracting, a1.repelling, cal * a1.length).group(),
      hyperbolic_elt(a2.attracting, a2.repelling, cal * a2.length).group()};
  PingPongCert cert;
  for (int i = 0; i < 4; ++i) {
    Arc arc{ang[i] - rho, ang[i] + rho};
    if (i % 2 == 0)
      cert.attract.push_back(arc);
    else
      cert.repel.push_back(arc);
  }
  verify_cert(letter_mats(grp), cert);
  grp.ping_pong = cert;
  return grp;
}

WordGroupRep power_subgroup(const WordGroupRep& grp, int n) {
  require_cert(grp, "power_subgroup: certified Schottky input required");
  SLX_REQUIRE(grp.tree.kind == TreeKind::free, Errc::invalid_argument,
              "power_subgroup: free input required");
  SLX_REQUIRE(n >= 1, Errc::invalid_argument, "power_subgroup: n must be positive");
  WordGroupRep out = grp;
  for (GroupElt& g : out.generators) {
    Mat3 p = Mat3::identity();
    for (int i = 0; i < n; ++i) p = p * g.m;
    g.m = p;
  }
  verify_cert(letter_mats(out), *out.ping_pong);
  return out;
}

WordGroupRep conjugate(const WordGroupRep& grp, const HElt& c) {
  require_cert(grp, "conjugate: certified input required");
  Mat3 cinv = h_inv(c.m);
  WordGroupRep out = grp;
  for (GroupElt& g : out.generators) g.m = c.m * (g.m * cinv);
  auto push = [&](const Arc& a) {
    double lo = bmap(c.m, a.lo);
    double w = wrap2pi(bmap(c.m, a.hi) - lo);
    return Arc{lo, lo + w};
  };
  for (Arc& a : out.ping_pong->attract) a = push(a);
  for (Arc& a : out.ping_pong->repel) a = push(a);
  verify_cert(letter_mats(out), *out.ping_pong);
  return out;
}

std::vector<std::vector<GroupElt>> word_shells(const WordGroupRep& grp, int depth) {
  SLX_REQUIRE(!grp.generators.empty(), Errc::invalid_argument,
              "word_shells: no generators");
  ShellData s = enumerate_shells(grp, depth);
  std::vector<std::vector<GroupElt>> out(s.mats.size());
  for (std::size_t d = 0; d < s.mats.size(); ++d) {
    out[d].reserve(s.mats[d].size());
    for (const Mat3& m : s.mats[d]) out[d].push_back(GroupElt{m});
  }
  return out;
}

BoundarySample limit_set(const WordGroupRep& grp, int depth) {
  require_cert(grp, "limit_set: ping-pong certificate required");
  SLX_REQUIRE(depth >= 1 && depth <= 10, Errc::invalid_argument,
              "limit_set: depth must be between 1 and 10");
  std::vector<Mat3> lmat = letter_mats(grp);
  const PingPongCert& cert = *grp.ping_pong;
  int nl = static_cast<int>(lmat.size());
  // The arcs are centered on the axis endpoints, so a single letter's
  // attracting angle is exact.
  auto fixed_angle = [&](int l) { return arc_of_letter(cert, l).mid(); };
  // Attracting fixed point of a reduced word. A word of the form c g c^{-1}
  // has its two fixed points only e^{-2 len(c)} apart, where any iteration
  // on the whole product lands on the repelling polar and cancels to zero.
  // Stripping to the cyclically reduced core separates the fixed points by
  // an arc gap, and pushing the core's angle back through the conjugator
  // one letter at a time keeps every map uniformly conditioned: each
  // intermediate point sits in the arc of the letter just applied, which
  // reducedness keeps away from the next letter's repelling arc.
  auto attracting_angle = [&](const std::vector<int>& word) {
    std::size_t i = 0, j = word.size();
    while (j - i >= 2 && word[i] == (word[j - 1] ^ 1)) {
      ++i;
      --j;
    }
    double theta = fixed_angle(word[i]);
    if (j - i >= 2) {
      Mat3 m = lmat[word[i]];
      for (std::size_t k = i + 1; k < j; ++k) {
        m = m * lmat[word[k]];
        m = m * (1.0 / m.norm_inf());
      }
      for (int it = 0; it < 200; ++it) {
        double next = bmap(m, theta);
        bool done = circ_dist(next, theta) < 1e-14;
        theta = next;
        if (done) break;
      }
    }
    for (std::size_t k = i; k-- > 0;) theta = bmap(lmat[word[k]], theta);
    return wrap2pi(theta);
  };
  std::vector<std::vector<double>> by_depth(depth + 1);
  std::vector<int> word;
  auto rec = [&](auto&& self, int d) -> void {
    for (int l = 0; l < nl; ++l) {
      if (!word.empty() && word.back() == (l ^ 1)) continue;
      word.push_back(l);
      by_depth[d].push_back(attracting_angle(word));
      if (d < depth) self(self, d + 1);
      word.pop_back();
    }
  };
  rec(rec, 1);
  BoundarySample out;
  out.depth = depth;
  for (int d = 1; d <= depth; ++d)
    out.angles.insert(out.angles.end(), by_depth[d].begin(), by_depth[d].end());
  return out;
}

std::vector<Arc> arc_system(const WordGroupRep& grp, int depth) {
  require_cert(grp, "arc_system: ping-pong certificate required");
  SLX_REQUIRE(depth >= 1 && depth <= 10, Errc::invalid_argument,
              "arc_system: depth must be between 1 and 10");
  std::vector<Mat3> lmat = letter_mats(grp);
  std::vector<std::pair<Arc, int>> level;
  for (int l = 0; l < static_cast<int>(lmat.size()); ++l)
    level.push_back({arc_of_letter(*grp.ping_pong, l), l});
  for (int d = 2; d <= depth; ++d) {
    std::vector<std::pair<Arc, int>> next;
    for (int l = 0; l < static_cast<int>(lmat.size()); ++l)
      for (const auto& [arc, first] : level) {
        if (first == (l ^ 1)) continue;
        double lo = bmap(lmat[l], arc.lo);
        double w = wrap2pi(bmap(lmat[l], arc.hi) - lo);
        next.push_back({Arc{lo, lo + w}, l});
      }
    level.swap(next);
  }
  std::vector<Arc> out;
  out.reserve(level.size());
  for (const auto& entry : level) out.push_back(entry.first);
  return out;
}

CriticalExponent critical_exponent(const WordGroupRep& grp) {
  require_cert(grp, "critical_exponent: ping-pong certificate required");
  // Orbit route: least-squares slope of log #{w : d(o, w.o) < T} against T.
  // The count is read off the sorted word distances. The window starts past
  // the first few shells, where lattice effects dominate, and stops at the
  // nearest point of the deepest enumerated shell: below that radius the
  // enumeration is complete, because longer words are farther out.
  ShellData shells = enumerate_shells(grp, 8);
  std::vector<double> dist;
  double t_lo = 0.0, t_hi = 0.0;
  for (int d = 1; d <= 8; ++d) {
    double mind = std::numeric_limits<double>::infinity();
    for (const Mat3& w : shells.mats[d]) {
      double v = d_hyp_to_o(w);
      mind = std::min(mind, v);
      dist.push_back(v);
    }
    if (d == 2) t_lo = mind;
    if (d == 8) t_hi = mind;
  }
  std::sort(dist.begin(), dist.end());
  // Even T grid so clusters of words at shell radii do not dominate the fit.
  std::vector<double> xs, ys;
  for (int i = 0; i < 48; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / 47.0;
    auto cnt = std::upper_bound(dist.begin(), dist.end(), t) - dist.begin();
    xs.push_back(t);
    ys.push_back(std::log(static_cast<double>(cnt) + 1.0));
  }
  LineFit orbit = least_squares(xs, ys);
  // Box route: dimension of the limit set on the circle.
  BoundarySample ls = limit_set(grp, 7);
  auto angles = std::make_shared<std::vector<double>>(std::move(ls.angles));
  MetricFn metric = [angles](std::size_t i, std::size_t j) {
    return circ_dist((*angles)[i], (*angles)[j]);
  };
  DimEstimate box = box_dimension(angles->size(), metric,
                                  geometric_scales(0.5, 5e-14, 16));
  CriticalExponent out;
  out.delta_box = box.slope;
  out.delta_orbit = orbit.slope;
  out.agreement_gap = std::fabs(box.slope - orbit.slope);
  out.box_r2 = box.r2;
  out.orbit_r2 = orbit.r2;
  out.low_confidence = box.r2 < 0.98 || orbit.r2 < 0.98;
  return out;
}

GeodesicY dense_geodesic(const WordGroupRep& grp, unsigned seed) {
  require_cert(grp, "dense_geodesic: ping-pong certificate required");
  std::vector<Mat3> lmat = letter_mats(grp);
  const PingPongCert& cert = *grp.ping_pong;
  std::mt19937 rng(seed);
  const int word_len = 36;
  int first_of_forward = -1;
  auto endpoint = [&](int avoid_first) {
    std::vector<int> word;
    word.reserve(word_len);
    for (int i = 0; i < word_len; ++i) {
      std::vector<int> cand;
      for (int l = 0; l < static_cast<int>(lmat.size()); ++l) {
        if (!word.empty() && l == (word.back() ^ 1)) continue;
        if (i == 0 && l == avoid_first) continue;
        cand.push_back(l);
      }
      word.push_back(
          cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)]);
    }
    // Apply the word to the last letter's attracting angle one letter at a
    // time; reducedness keeps each intermediate point outside the next
    // letter's repelling arc, so no step degenerates.
    double theta = arc_of_letter(cert, word.back()).mid();
    for (std::size_t k = word.size(); k-- > 0;) theta = bmap(lmat[word[k]], theta);
    if (avoid_first < 0) first_of_forward = word.front();
    return theta;
  };
  double forward = endpoint(-1);
  double backward = endpoint(first_of_forward);
  return geodesic_between(forward, backward);
}

QuotientOrbitCloud closure_sample(const WordGroupRep& grp, const GeodesicY& L,
                                  double T, double step, int reduction_radius) {
  require_cert(grp, "closure_sample: ping-pong certificate required");
  SLX_REQUIRE(T > 0.0 && step > 0.0 && T / step <= 2e6, Errc::invalid_argument,
              "closure_sample: need 0 < step, 0 < T, and a sane sample count");
  SLX_REQUIRE(reduction_radius >= 0 && reduction_radius <= 6,
              Errc::invalid_argument,
              "closure_sample: reduction radius must be between 0 and 6");
  std::vector<Mat3> lmat = letter_mats(grp);
  ShellData ball = enumerate_shells(grp, reduction_radius);
  // Distance of the frame's basepoint to o through the top singular value;
  // the disk chart loses the interior margin to underflow once the flow has
  // run a few dozen units, while this stays exact.
  auto d0 = [&](const Mat3& f) { return d_hyp_to_o(f); };
  QuotientOrbitCloud out;
  out.reduction_radius = reduction_radius;
  std::size_t count = static_cast<std::size_t>(std::floor(T / step)) + 1;
  out.frames.reserve(count);
  // The flow is advanced on the already-reduced representative, so the
  // matrix never drifts more than one step past the fundamental domain;
  // composing the full flow first would overflow beyond t of a few hundred.
  Mat3 flow = h_s(step).m;
  Mat3 carried = L.h.m;
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) carried = carried * flow;
    Mat3 f = carried;
    // Greedy letter descent toward the fundamental domain; each step strictly
    // shrinks the basepoint distance, so it terminates.
    double cur = d0(f);
    for (int guard = 0; guard < 100000; ++guard) {
      double best = cur;
      int best_l = -1;
      for (std::size_t l = 0; l < lmat.size(); ++l) {
        double d = d0(lmat[l] * f);
        if (d < best - 1e-9) {
          best = d;
          best_l = static_cast<int>(l);
        }
      }
      if (best_l < 0) break;
      f = lmat[best_l] * f;
      cur = best;
    }
    // Exhaustive polish over the word ball; a minimizer on the ball boundary
    // means a bigger radius might still improve the representative.
    double best_inner = cur, best_outer = cur;
    const Mat3* best_mat = nullptr;
    for (int d = 1; d <= reduction_radius; ++d)
      for (const Mat3& g : ball.mats[d]) {
        double dist = d0(g * f);
        if (dist < best_outer - 1e-9) {
          best_outer = dist;
          best_mat = &g;
          if (d < reduction_radius) best_inner = std::min(best_inner, dist);
        } else if (d < reduction_radius) {
          best_inner = std::min(best_inner, dist);
        }
      }
    if (best_mat != nullptr) {
      if (best_outer < best_inner - 1e-9) out.under_reduced.push_back(k);
      f = *best_mat * f;
    }
    out.frames.push_back(HElt{f});
    carried = f;
  }
  return out;
}

DimEstimate closure_dimension(const WordGroupRep& grp,
                              const QuotientOrbitCloud& cloud,
                              const std::vector<double>& scales) {
  SLX_REQUIRE(!grp.generators.empty(), Errc::invalid_argument,
              "closure_dimension: no generators");
  int radius = std::max(1, cloud.reduction_radius);
  ShellData ball = enumerate_shells(grp, radius);
  struct Shared {
    std::vector<Mat3> f, finv, ginv;
  };
  auto sh = std::make_shared<Shared>();
  for (const HElt& h : cloud.frames) {
    sh->f.push_back(h.m);
    sh->finv.push_back(h_inv(h.m));
  }
  for (const auto& shell : ball.mats)
    for (const Mat3& g : shell) sh->ginv.push_back(h_inv(g));
  // d([f_i],[f_j]) = min over the ball of a symmetric frame distance; the
  // ball is inverse-closed, so the minimum is symmetric in i and j. The
  // counting loops probe one i against many j, so the i-dependent products
  // are cached per thread.
  MetricFn metric = [sh](std::size_t i, std::size_t j) {
    struct Cache {
      const void* owner = nullptr;
      std::size_t i = static_cast<std::size_t>(-1);
      std::vector<Mat3> left;
    };
    thread_local Cache cache;
    if (cache.owner != sh.get() || cache.i != i) {
      cache.owner = sh.get();
      cache.i = i;
      cache.left.clear();
      for (const Mat3& ginv : sh->ginv) cache.left.push_back(sh->finv[i] * ginv);
    }
    // A lies in the form group, so A^{-1} = J A^T J with J orthogonal and
    // the inverse term equals the forward one: the sum is just 2 |A - I|.
    double best = 1e300;
    for (const Mat3& left : cache.left) {
      Mat3 a = left * sh->f[j];
      double d = 2.0 * (a - Mat3::identity()).norm_fro();
      if (d < best) best = d;
    }
    return best;
  };
  return box_dimension(sh->f.size(), metric, scales);
}

AdmissibilityReport admissibility_check(const WordGroupRep& grp,
                                        const QuotientOrbitCloud& cloud,
                                        const std::vector<HElt>& charts) {
  SLX_REQUIRE(!grp.generators.empty(), Errc::invalid_argument,
              "admissibility_check: no generators");
  SLX_REQUIRE(!cloud.frames.empty(), Errc::invalid_argument,
              "admissibility_check: empty cloud");
  // The boundary Cantor set repeats its structure once per letter, with
  // log-scale period sqrt(2) times the translation length. Windows one
  // period apart and two periods wide each average whole generations, so a
  // self-similar projection scores the same dimension in every window while
  // a scale-dependent one is exposed. The period is capped so the windows
  // stay above roundoff for strongly contracting groups.
  double mean_len = 0.0;
  for (const GroupElt& g : grp.generators) {
    Mat3 p = g.m;
    for (int i = 0; i < 3; ++i) p = p * p;
    double f = p.norm_inf();
    EigSym e = sym_eig(((p * (1.0 / f)) * p.transpose() * (1.0 / f)).symmetrized(), 1e-8);
    mean_len += (0.5 * std::log(e.values[0]) + std::log(f)) / 8.0;
  }
  mean_len /= static_cast<double>(grp.generators.size());
  double period = std::min(kSqrt2 * mean_len, 3.6);
  double wtop[3], wbot[3];
  for (int w = 0; w < 3; ++w) {
    wtop[w] = 0.5 * std::exp(-period * w);
    wbot[w] = wtop[w] * std::exp(-2.0 * period);
  }
  const Mat3& w0 = constants().w0;
  AdmissibilityReport report;
  for (const HElt& chart : charts) {
    ChartReport cr{};
    std::vector<double> plus, minus;
    std::size_t miss = 0;
    for (const HElt& f : cloud.frames) {
      try {
        // In the chart decomposition h0 n+ n- a, the n+ slot is the only
        // coordinate pinned by a single endpoint: it parametrizes h[e3].
        // Reading the same slot of the flow-reversed frame f w0 therefore
        // gives the forward endpoint, and the two projections separate the
        // endpoint pair the way the Hopf coordinates do.
        BruhatCoords bcm = bruhat_coords(f, chart);
        BruhatCoords bcp = bruhat_coords(HElt{f.m * w0}, chart);
        if (std::fabs(bcm.n_plus) > 1e3 || std::fabs(bcp.n_plus) > 1e3) {
          ++miss;
        } else {
          minus.push_back(bcm.n_plus);
          plus.push_back(bcp.n_plus);
        }
      } catch (const Error&) {
        ++miss;
      }
    }
    cr.miss_fraction =
        static_cast<double>(miss) / static_cast<double>(cloud.frames.size());
    cr.rejected = cr.miss_fraction > 0.5 || plus.size() < 1000;
    if (!cr.rejected) {
      double lo = 1e300, hi = -1e300;
      for (int w = 0; w < 3; ++w) {
        for (int side = 0; side < 2; ++side) {
          auto vals = std::make_shared<std::vector<double>>(side == 0 ? plus : minus);
          MetricFn metric = [vals](std::size_t i, std::size_t j) {
            return std::fabs((*vals)[i] - (*vals)[j]);
          };
          double dim = box_dimension(vals->size(), metric,
                                     geometric_scales(wtop[w], wbot[w], 12))
                           .slope;
          (side == 0 ? cr.dim_plus : cr.dim_minus)[w] = dim;
          lo = std::min(lo, dim);
          hi = std::max(hi, dim);
        }
      }
      cr.stability = hi - lo;
      cr.stable = cr.stability <= 0.2;
    }
    report.charts.push_back(cr);
  }
  return report;
}

std::string boundary_csv(const BoundarySample& sample) {
  std::string out = "angle\r\n";
  char buf[64];
  for (double a : sample.angles) {
    std::snprintf(buf, sizeof buf, "%.17g\r\n", a);
    out += buf;
  }
  return out;
}

std::string cloud_csv(const QuotientOrbitCloud& cloud) {
  std::string out = "m00,m01,m02,m10,m11,m12,m20,m21,m22\r\n";
  char buf[40];
  for (const HElt& f : cloud.frames) {
    for (int i = 0; i < 9; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g%c", f.m.a[i], i == 8 ? '\r' : ',');
      out += buf;
    }
    out += '\n';
  }
  return out;
}

} // namespace slx
