#include "smallsvd.hpp"

#include <algorithm>
#include <cmath>

#include "slx/error.hpp"

namespace slx::detail {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace

std::vector<double> singular_values(std::vector<std::vector<double>> cols) {
  const std::size_t n = cols.size();
  if (n == 0) return {};
  const std::size_t m = cols[0].size();
  for (const auto& c : cols)
    SLX_REQUIRE(c.size() == m, Errc::invalid_argument, "singular_values: ragged columns");

  // One-sided Jacobi: rotate column pairs until all are mutually orthogonal.
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = dot(cols[p], cols[p]);
        double aqq = dot(cols[q], cols[q]);
        double apq = dot(cols[p], cols[q]);
        if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::size_t i = 0; i < m; ++i) {
          double vp = cols[p][i], vq = cols[q][i];
          cols[p][i] = c * vp - s * vq;
          cols[q][i] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(dot(cols[j], cols[j]));
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

int numerical_rank(const std::vector<std::vector<double>>& cols, double rel_tol) {
  std::vector<double> sv = singular_values(cols);
  if (sv.empty() || sv[0] == 0.0) return 0;
  int r = 0;
  for (double s : sv)
    if (s > rel_tol * sv[0]) ++r;
  return r;
}

} // namespace slx::detail
