#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace symrate::geometry {

using Point = std::vector<double>;

/// Smallest l1 residual |p - sum_j w_j q_j| over w >= 0, found with a
/// phase-one simplex (Bland's rule). Points on the probability simplex make
/// any non-negative combination that hits p a convex one, so a residual of
/// zero means p lies in the convex hull of `points`.
inline double convex_residual(std::span<const Point> points, std::span<const double> target) {
  const std::size_t rows = target.size();
  const std::size_t m = points.size();
  if (m == 0) {
    double r = 0.0;
    for (double v : target) r += std::abs(v);
    return r;
  }
  const std::size_t cols = m + rows;  // point weights, then artificials
  // Tableau: rows x (cols + 1), last column is the right-hand side.
  std::vector<double> t(rows * (cols + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * (cols + 1) + c]; };
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < m; ++j) at(r, j) = points[j][r];
    at(r, m + r) = 1.0;
    at(r, cols) = target[r];
    basis[r] = m + r;
  }

  constexpr double kEps = 1e-12;
  std::vector<double> cost(cols + 1, 0.0);
  for (;;) {
    // Reduced costs of minimizing the sum of artificials.
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t c = 0; c < m + rows; ++c) cost[c] = c >= m ? 1.0 : 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (basis[r] < m) continue;
      for (std::size_t c = 0; c <= cols; ++c) cost[c] -= at(r, c);
    }
    std::size_t enter = cols;
    for (std::size_t c = 0; c < cols; ++c)
      if (cost[c] < -kEps) {
        enter = c;
        break;
      }
    if (enter == cols) return std::max(0.0, -cost[cols]);

    std::size_t leave = rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = at(r, enter);
      if (a <= kEps) continue;
      const double ratio = at(r, cols) / a;
      if (ratio < best - kEps || (ratio <= best + kEps && leave < rows && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == rows) return std::max(0.0, -cost[cols]);  // unbounded direction; cannot happen here

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c <= cols; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }
}

/// Indices of points that are vertices of the convex hull of all points.
/// Coincident points (within 1e-12) share vertex status; a point is dropped
/// when it lies within `tol` (l1) of the hull of the other distinct points.
inline std::vector<std::size_t> hull_vertex_indices(std::span<const Point> points, double tol = 1e-9) {
  const std::size_t n = points.size();
  std::vector<std::size_t> group(n);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n; ++i) {
    group[i] = reps.size();
    for (std::size_t g = 0; g < reps.size(); ++g) {
      const auto& q = points[reps[g]];
      bool same = true;
      for (std::size_t d = 0; d < q.size() && same; ++d) same = std::abs(q[d] - points[i][d]) <= 1e-12;
      if (same) {
        group[i] = g;
        break;
      }
    }
    if (group[i] == reps.size()) reps.push_back(i);
  }

  std::vector<char> is_vertex(reps.size(), 0);
  std::vector<Point> others;
  for (std::size_t g = 0; g < reps.size(); ++g) {
    others.clear();
    for (std::size_t h = 0; h < reps.size(); ++h)
      if (h != g) others.push_back(points[reps[h]]);
    is_vertex[g] = convex_residual(others, points[reps[g]]) > tol;
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (is_vertex[group[i]]) out.push_back(i);
  return out;
}

}  // namespace symrate::geometry
