#pragma once

// One-sided Jacobi singular values for small dense matrices (columns of
// arbitrary common length). Internal helper for numerical rank decisions;
// not part of the public module surface.

#include <cstddef>
#include <vector>

namespace slx::detail {

// Singular values, descending. `cols` is a list of equal-length columns.
std::vector<double> singular_values(std::vector<std::vector<double>> cols);

// Count of singular values > rel_tol * sigma_max (0 for an all-zero matrix).
int numerical_rank(const std::vector<std::vector<double>>& cols, double rel_tol);

} // namespace slx::detail
