#include "slx/fracdim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "slx/error.hpp"

namespace slx {

std::vector<double> geometric_scales(double top, double bottom, std::size_t n) {
  SLX_REQUIRE(top > bottom && bottom > 0.0 && n >= 2, Errc::invalid_argument,
              "geometric_scales: need top > bottom > 0 and n >= 2");
  std::vector<double> out(n);
  double ratio = std::log(bottom / top) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = top * std::exp(ratio * static_cast<double>(i));
  return out;
}

namespace {

// Size of a greedy maximal eps-separated subset in input order. Sandwiched
// between the covering numbers at eps and eps/2, which is all box counting
// needs. The greedy packing constant depends mildly on point order, so
// subsamples should keep the relative order of the full sample when
// estimates are compared.
std::size_t net_count(std::size_t n, const MetricFn& metric, double eps) {
  std::vector<std::size_t> net;
  for (std::size_t i = 0; i < n; ++i) {
    bool covered = false;
    for (std::size_t j : net)
      if (metric(i, j) <= eps) {
        covered = true;
        break;
      }
    if (!covered) net.push_back(i);
  }
  return net.size();
}

struct Fit {
  double slope, r2;
};

// Least squares of y against x; r² as the squared correlation so that a
// zero-variance plateau scores 0, not 1.
Fit fit_window(const std::vector<double>& x, const std::vector<double>& y,
               std::size_t lo, std::size_t len) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  double nn = static_cast<double>(len);
  for (std::size_t i = lo; i < lo + len; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double vx = sxx - sx * sx / nn;
  double vy = syy - sy * sy / nn;
  double cxy = sxy - sx * sy / nn;
  if (vx <= 0.0 || vy <= 1e-30) return {0.0, 0.0};
  double r2 = (cxy * cxy) / (vx * vy);
  return {cxy / vx, std::min(r2, 1.0)};
}

} // namespace

DimEstimate box_dimension(std::size_t n_points, const MetricFn& metric,
                          const std::vector<double>& scales) {
  SLX_REQUIRE(n_points >= 1000, Errc::invalid_argument,
              "box_dimension: need at least 1000 points");
  SLX_REQUIRE(scales.size() >= 8, Errc::invalid_argument,
              "box_dimension: need at least 8 scales");
  std::vector<double> sc = scales;
  std::sort(sc.begin(), sc.end(), std::greater<double>());
  SLX_REQUIRE(sc.back() > 0.0, Errc::invalid_argument,
              "box_dimension: scales must be positive");
  SLX_REQUIRE(std::log10(sc.front() / sc.back()) >= 2.5, Errc::invalid_argument,
              "box_dimension: scales must span at least 2.5 decades");

  std::vector<std::size_t> counts(sc.size());
  {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < sc.size(); ++i)
      jobs.push_back(std::async(std::launch::async, [&, i] {
        counts[i] = net_count(n_points, metric, sc[i]);
      }));
    for (auto& j : jobs) j.get();
  }

  std::vector<double> x(sc.size()), y(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i) {
    x[i] = -std::log(sc[i]);
    y[i] = std::log(static_cast<double>(counts[i]));
  }

  // saturation flattens both ends of the log-log curve, so the fit window is
  // the contiguous stretch of at least 5 scales with the best correlation;
  // scales with fewer than 3 boxes or more than half the sample carry no
  // scaling information and are kept out of windows when possible
  auto informative = [&](std::size_t i) {
    return counts[i] >= 3 && 2 * counts[i] <= n_points;
  };
  DimEstimate best;
  best.r2 = -1.0;
  for (int pass = 0; pass < 2 && best.r2 < 0.0; ++pass)
    for (std::size_t len = 5; len <= sc.size(); ++len)
      for (std::size_t lo = 0; lo + len <= sc.size(); ++lo) {
        if (pass == 0) {
          bool ok = true;
          for (std::size_t i = lo; i < lo + len; ++i) ok = ok && informative(i);
          if (!ok) continue;
        }
        Fit f = fit_window(x, y, lo, len);
        bool better = f.r2 > best.r2 + 1e-12 ||
                      (std::abs(f.r2 - best.r2) <= 1e-12 &&
                       sc[lo] - sc[lo + len - 1] >
                           best.scale_max - best.scale_min + 1e-300);
        if (better) {
          best.slope = f.slope;
          best.r2 = f.r2;
          best.scale_max = sc[lo];
          best.scale_min = sc[lo + len - 1];
        }
      }
  best.counts.reserve(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i) best.counts.push_back({sc[i], counts[i]});
  if (best.r2 < 0.0) best.r2 = 0.0;
  return best;
}

double hausdorff_distance(std::size_t na, std::size_t nb, const MetricFn& cross) {
  SLX_REQUIRE(na > 0 && nb > 0, Errc::invalid_argument,
              "hausdorff_distance: empty sample");
  double h = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nb; ++j) m = std::min(m, cross(i, j));
    h = std::max(h, m);
  }
  for (std::size_t j = 0; j < nb; ++j) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < na; ++i) m = std::min(m, cross(i, j));
    h = std::max(h, m);
  }
  return h;
}

ProductCheck product_dimension_check(const DimEstimate& base, double fiber_dim,
                                     const DimEstimate& product, double tol) {
  ProductCheck c{};
  c.product_dim = product.slope;
  c.residual = product.slope - (base.slope + fiber_dim);
  c.lower_bound = 0.5 * (3.0 + base.slope);
  c.upper_bound = 1.0 + base.slope;
  c.lower_ok = product.slope >= c.lower_bound - tol;
  c.upper_ok = product.slope <= c.upper_bound + tol;
  c.low_confidence = base.r2 < 0.9 || product.r2 < 0.9;
  return c;
}

std::string to_json(const DimEstimate& e) {
  char buf[160];
  std::string s = "{";
  std::snprintf(buf, sizeof buf,
                "\"slope\":%.12g,\"r2\":%.12g,\"scale_min\":%.12g,\"scale_max\":%.12g,"
                "\"counts\":[",
                e.slope, e.r2, e.scale_min, e.scale_max);
  s += buf;
  for (std::size_t i = 0; i < e.counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s[%.12g,%zu]", i ? "," : "", e.counts[i].first,
                  e.counts[i].second);
    s += buf;
  }
  s += "]}";
  return s;
}

std::string counts_csv(const DimEstimate& e) {
  std::string s = "scale,count\r\n";
  char buf[64];
  for (const auto& [scale, count] : e.counts) {
    std::snprintf(buf, sizeof buf, "%.12g,%zu\r\n", scale, count);
    s += buf;
  }
  return s;
}

} // namespace slx
