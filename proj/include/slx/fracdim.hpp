#pragma once

// Box-counting dimension estimation on finite samples of a metric space,
// with fit diagnostics, finite-sample Hausdorff distance, and the product
// structure checks used by the closure experiments.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace slx {

// Distance between the points at two indices of a caller-held sample.
using MetricFn = std::function<double(std::size_t, std::size_t)>;

struct DimEstimate {
  double slope = 0.0; // dimension estimate
  double r2 = 0.0;    // fit quality over the chosen window
  double scale_min = 0.0, scale_max = 0.0;
  std::vector<std::pair<double, std::size_t>> counts; // (scale, net size)
};

// n geometric scales from top down to bottom inclusive.
std::vector<double> geometric_scales(double top, double bottom, std::size_t n);

// Greedy ε-net counts N(ε) per scale, then the least-squares slope of
// log N against log(1/ε) over the best-r² window of at least 5 consecutive
// scales. Requires ≥ 1000 points and ≥ 8 scales spanning ≥ 2.5 decades.
// ε-nets are isometry-invariant, so curved ambient spaces need no chart.
DimEstimate box_dimension(std::size_t n_points, const MetricFn& metric,
                          const std::vector<double>& scales);

// Max of the two directed sup-min distances between finite samples.
// cross(i, j) is the distance from the i-th point of A to the j-th of B.
double hausdorff_distance(std::size_t na, std::size_t nb, const MetricFn& cross);

struct ProductCheck {
  double residual;    // product dim − (base dim + fiber dim)
  double product_dim; // as estimated
  double lower_bound; // (3 + base dim) / 2
  double upper_bound; // 1 + base dim
  bool lower_ok, upper_ok;
  bool low_confidence; // either fit's r² below 0.9
};

// Residual of the additive dimension law together with the sandwich bounds
// (3 + base)/2 − tol ≤ product ≤ 1 + base + tol.
ProductCheck product_dimension_check(const DimEstimate& base, double fiber_dim,
                                     const DimEstimate& product,
                                     double tol = 0.15);

std::string to_json(const DimEstimate& e);
std::string counts_csv(const DimEstimate& e);

} // namespace slx
