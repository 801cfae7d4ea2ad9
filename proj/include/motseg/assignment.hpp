#pragma once

// Minimum-cost bipartite assignment (Kuhn-Munkres, shortest augmenting path
// form) over rectangular cost matrices with infeasible entries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "motseg/error.hpp"

namespace motseg {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = kInfeasible)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) fail(ErrorCode::kShapeMismatch, "ragged cost matrix");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  static bool feasible(double cost) { return std::isfinite(cost); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), rows ascending
  double total_cost = 0.0;
};

/// Among matchings that use only feasible entries, returns one of maximum
/// cardinality and, among those, minimum total cost. Deterministic: ties
/// resolve by processing rows in ascending order.
inline Matching solve_assignment(const CostMatrix& costs) {
  Matching result;
  const std::size_t rows = costs.rows(), cols = costs.cols();
  if (rows == 0 || cols == 0) return result;
  const std::size_t n = std::max(rows, cols);

  double lo = 0.0, hi = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = costs(r, c);
      if (std::isnan(v)) fail(ErrorCode::kInvalidArgument, "NaN in cost matrix");
      if (CostMatrix::feasible(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  // Any single infeasible pair outweighs every difference between finite
  // assignment totals, so cardinality is maximized first.
  const double big = static_cast<double>(n) * (hi - lo) + 1.0 + std::abs(hi);

  // Padded entries (dummy rows/cols) cost 0.
  auto entry = [&](std::size_t r, std::size_t c) {
    if (r >= rows || c >= cols) return 0.0;
    const double v = costs(r, c);
    return CostMatrix::feasible(v) ? v : big;
  };

  // 1-based potentials and matching, index 0 is the virtual root column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), std::numeric_limits<double>::infinity());
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match_of_col[j0];
      double delta = std::numeric_limits<double>::infinity();
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_of_col[j0] = match_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n, n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (match_of_col[j] != 0) col_of_row[match_of_col[j] - 1] = j - 1;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = col_of_row[r];
    if (c >= cols || !CostMatrix::feasible(costs(r, c))) continue;
    result.pairs.emplace_back(r, c);
    result.total_cost += costs(r, c);
  }
  return result;
}

/// Solves, then drops pairs whose cost exceeds `gate` (they stay unassigned).
inline Matching hungarian_solve(const CostMatrix& costs, double gate = kInfeasible) {
  Matching solved = solve_assignment(costs);
  Matching gated;
  for (const auto& [r, c] : solved.pairs) {
    if (costs(r, c) > gate) continue;
    gated.pairs.emplace_back(r, c);
    gated.total_cost += costs(r, c);
  }
  return gated;
}

}  // namespace motseg
