#pragma once

// Dense two-phase tableau simplex with Bland's rule. Test-only oracle for
// small transportation instances; deliberately independent of the network
// simplex implementation it checks.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace lp_oracle {

struct LpResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> x;
};

// min c^T x  s.t.  A x = b, x >= 0
inline LpResult solve_lp(std::vector<std::vector<double>> A, std::vector<double> b,
                         std::vector<double> c) {
  const double eps = 1e-10;
  const std::size_t m = A.size(), n = c.size();
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0.0) {
      for (auto& v : A[i]) v = -v;
      b[i] = -b[i];
    }

  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = n + i;
  }

  const auto pivot = [&](std::size_t row, std::size_t col) {
    const double pv = t[row][col];
    for (auto& v : t[row]) v /= pv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  };

  const auto run_phase = [&](const std::vector<double>& cost) -> bool {
    while (true) {
      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < cost.size(); ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc < -eps) {
          enter = j;  // Bland: first improving column
          break;
        }
      }
      if (enter == SIZE_MAX) return true;
      std::size_t leave = SIZE_MAX;
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= eps) continue;
        const double ratio = t[i][width - 1] / t[i][enter];
        if (leave == SIZE_MAX || ratio < best - 1e-12 ||
            (std::fabs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == SIZE_MAX) return false;  // unbounded
      pivot(leave, enter);
    }
  };

  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t j = n; j < n + m; ++j) phase1[j] = 1.0;
  if (!run_phase(phase1)) return {};
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += t[i][width - 1];
  if (infeas > 1e-8) return {};

  // Erase the artificial columns so they can never re-enter.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = n; j < n + m; ++j) t[i][j] = 0.0;
  std::vector<double> phase2(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  if (!run_phase(phase2)) return {};

  LpResult res;
  res.feasible = true;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][width - 1];
  for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

// Transportation instance with uniform marginals as an equality-form LP.
inline LpResult solve_transport_lp(const std::vector<std::vector<double>>& cost) {
  const std::size_t n_a = cost.size(), n_p = cost.front().size();
  const std::size_t n = n_a * n_p;
  std::vector<std::vector<double>> A(n_a + n_p, std::vector<double>(n, 0.0));
  std::vector<double> b(n_a + n_p);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n_a; ++i) {
    for (std::size_t j = 0; j < n_p; ++j) {
      A[i][i * n_p + j] = 1.0;
      A[n_a + j][i * n_p + j] = 1.0;
      c[i * n_p + j] = cost[i][j];
    }
    b[i] = 1.0 / static_cast<double>(n_a);
  }
  for (std::size_t j = 0; j < n_p; ++j) b[n_a + j] = 1.0 / static_cast<double>(n_p);
  return solve_lp(std::move(A), std::move(b), std::move(c));
}

}  // namespace lp_oracle
