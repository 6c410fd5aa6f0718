#include "datajoin/projection.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace datajoin {

double set_slack(const ModelPoint& point, const FeasibleSetSpec& set) {
  set.validate();
  double slack =
      set.scale * (point.alpha_aux + point.alpha_lab) - p_norm(point.theta_x, 2.0);
  if (set.with_aux_cone)
    slack = std::min(slack, set.kappa_aux * point.alpha_aux - p_norm(point.theta_a, 2.0));
  slack = std::min(slack, set.branch == Branch::aux_min ? point.alpha_lab - point.alpha_aux
                                                        : point.alpha_aux - point.alpha_lab);
  slack = std::min(slack, std::min(point.alpha_aux, point.alpha_lab));
  return slack;
}

namespace {

constexpr double kFeasTol = 1e-9;

// Scalarized view of the projection problem: the set constrains the two
// coefficient blocks only through their Euclidean norms, so with
// z = (t1, t2, a, b), t1 = ||theta_x'||, t2 = ||theta_a'||, the projection
// solves min ||z - z0||^2 over a polyhedron and the blocks rescale along
// their original directions.
struct ScalarTarget {
  double t1, t2, a, b;
};

struct Candidate {
  ScalarTarget z;
  bool valid = false;
};

double sq_dist(const ScalarTarget& z, const ScalarTarget& z0) {
  return sqr(z.t1 - z0.t1) + sqr(z.t2 - z0.t2) + sqr(z.a - z0.a) + sqr(z.b - z0.b);
}

bool scalar_feasible(const ScalarTarget& z, const FeasibleSetSpec& set) {
  if (z.a < -kFeasTol || z.b < -kFeasTol || z.t1 < -kFeasTol || z.t2 < -kFeasTol) return false;
  if (z.t1 - set.scale * (z.a + z.b) > kFeasTol) return false;
  if (set.with_aux_cone && z.t2 - set.kappa_aux * z.a > kFeasTol) return false;
  const double order = set.branch == Branch::aux_min ? z.b - z.a : z.a - z.b;
  return order >= -kFeasTol;
}

void clamp_tiny(double& v) {
  if (v < 0.0 && v > -1e-12) v = 0.0;
}

void clamp_tiny(ScalarTarget& z) {
  clamp_tiny(z.t1);
  clamp_tiny(z.t2);
  clamp_tiny(z.a);
  clamp_tiny(z.b);
}

// The eight tabulated stationary patterns of the KKT system when neither
// alpha bound is active (plain set, scale 1): both cones slack or tight,
// crossed with the order constraint slack or tight. Formulas are kept
// verbatim from the case analysis; patterns that rescale a zero block are
// skipped (the generic enumeration covers those inputs).
std::vector<Candidate> tabulated_candidates(const ScalarTarget& z0, double kappa) {
  const double n1 = z0.t1, n2 = z0.t2, a0 = z0.a, b0 = z0.b, k = kappa;
  std::vector<Candidate> out;
  const auto add = [&](double t1, double t2, double a, double b) {
    out.push_back({{t1, t2, a, b}, true});
  };
  const auto skip = [&]() { out.push_back({{}, false}); };

  // order constraint slack
  add(n1, n2, a0, b0);
  if (n2 > 0.0) {
    const double a = (a0 + k * n2) / (1.0 + k * k);
    add(n1, k * a, a, b0);
  } else {
    skip();
  }
  if (n1 > 0.0) {
    const double b = (n1 - a0 + 2.0 * b0) / 3.0;
    const double a = a0 + b - b0;
    add(a + b, n2, a, b);
  } else {
    skip();
  }
  if (n1 > 0.0 && n2 > 0.0) {
    const double a = (2.0 * a0 + b0 + n1 + 2.0 * k * n2) / (3.0 + 2.0 * k * k);
    const double b = (n1 + b0) / 2.0 - a / 2.0;
    add(a + b, k * a, a, b);
  } else {
    skip();
  }

  // order constraint tight: alpha_aux = alpha_lab
  {
    const double c = (a0 + b0) / 2.0;
    add(n1, n2, c, c);
  }
  if (n2 > 0.0) {
    const double c = (a0 + b0 + k * n2) / (2.0 + k * k);
    add(n1, k * c, c, c);
  } else {
    skip();
  }
  if (n1 > 0.0) {
    const double c = (a0 + b0 + 2.0 * n1) / 6.0;
    add(2.0 * c, n2, c, c);
  } else {
    skip();
  }
  if (n1 > 0.0 && n2 > 0.0) {
    const double c = (a0 + b0 + 2.0 * n1 + k * n2) / (6.0 + k * k);
    add(2.0 * c, k * c, c, c);
  } else {
    skip();
  }
  return out;
}

// Equality-constrained least squares for one active-set pattern:
// min ||z - z0||^2 s.t. R z = 0 with R the active rows. The solution is
// z0 - R^T (R R^T)^{-1} R z0; patterns with dependent rows are skipped.
bool solve_active_set(const std::vector<std::array<double, 4>>& rows, const ScalarTarget& z0,
                      ScalarTarget& out) {
  const std::size_t m = rows.size();
  const std::array<double, 4> z0v{z0.t1, z0.t2, z0.a, z0.b};
  if (m == 0) {
    out = z0;
    return true;
  }
  // gram = R R^T, rhs = R z0
  std::vector<std::vector<double>> gram(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t d = 0; d < 4; ++d) gram[r][c] += rows[r][d] * rows[c][d];
    for (std::size_t d = 0; d < 4; ++d) gram[r][m] += rows[r][d] * z0v[d];
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(gram[r][col]) > std::fabs(gram[piv][col])) piv = r;
    if (std::fabs(gram[piv][col]) < 1e-12) return false;
    std::swap(gram[col], gram[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = gram[r][col] / gram[col][col];
      for (std::size_t c = col; c <= m; ++c) gram[r][c] -= f * gram[col][c];
    }
  }
  std::array<double, 4> z = z0v;
  for (std::size_t r = 0; r < m; ++r) {
    const double mu = gram[r][m] / gram[r][r];
    for (std::size_t d = 0; d < 4; ++d) z[d] -= mu * rows[r][d];
  }
  out = {z[0], z[1], z[2], z[3]};
  return true;
}

ScalarTarget scalar_project(const ScalarTarget& z0, const FeasibleSetSpec& set, bool* found) {
  // Constraint rows over (t1, t2, a, b), all of the form row . z <= 0.
  std::vector<std::array<double, 4>> rows;
  rows.push_back({1.0, 0.0, -set.scale, -set.scale});                    // feature cone
  if (set.with_aux_cone) rows.push_back({0.0, 1.0, -set.kappa_aux, 0.0});  // auxiliary cone
  if (set.branch == Branch::aux_min)
    rows.push_back({0.0, 0.0, 1.0, -1.0});
  else
    rows.push_back({0.0, 0.0, -1.0, 1.0});
  rows.push_back({0.0, 0.0, -1.0, 0.0});   // alpha_aux >= 0
  rows.push_back({0.0, 0.0, 0.0, -1.0});   // alpha_lab >= 0
  rows.push_back({-1.0, 0.0, 0.0, 0.0});   // t1 >= 0
  rows.push_back({0.0, -1.0, 0.0, 0.0});   // t2 >= 0

  double best = std::numeric_limits<double>::infinity();
  ScalarTarget best_z{};
  bool any = false;

  const bool plain = set.scale == 1.0 && set.with_aux_cone;
  if (plain) {
    for (auto& cand : tabulated_candidates(z0, set.kappa_aux)) {
      if (!cand.valid) continue;
      clamp_tiny(cand.z);
      if (!scalar_feasible(cand.z, set)) continue;
      const double d = sq_dist(cand.z, z0);
      if (d < best) {
        best = d;
        best_z = cand.z;
        any = true;
      }
    }
  }

  const std::size_t n_rows = rows.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n_rows); ++mask) {
    if (std::popcount(mask) > 4) continue;
    std::vector<std::array<double, 4>> active;
    for (std::size_t r = 0; r < n_rows; ++r)
      if (mask & (std::size_t{1} << r)) active.push_back(rows[r]);
    ScalarTarget z;
    if (!solve_active_set(active, z0, z)) continue;
    clamp_tiny(z);
    if (!scalar_feasible(z, set)) continue;
    const double d = sq_dist(z, z0);
    if (d < best - 1e-15) {
      best = d;
      best_z = z;
      any = true;
    }
  }
  *found = any;
  return best_z;
}

Vec rescale_block(const Vec& block, double old_norm, double new_norm) {
  Vec out(block.size(), 0.0);
  if (old_norm > 0.0 && new_norm > 0.0) {
    const double f = new_norm / old_norm;
    for (std::size_t d = 0; d < block.size(); ++d) out[d] = f * block[d];
  }
  return out;
}

}  // namespace

ModelPoint project(const ModelPoint& point, const FeasibleSetSpec& set) {
  set.validate();
  ModelPoint out = point;
  out.branch = set.branch;
  if (set_contains(out, set, 0.0)) return out;

  const ScalarTarget z0{p_norm(point.theta_x, 2.0),
                        set.with_aux_cone ? p_norm(point.theta_a, 2.0) : 0.0, point.alpha_aux,
                        point.alpha_lab};
  bool found = false;
  const ScalarTarget z = scalar_project(z0, set, &found);
  if (!found) return project_oracle(point, set);  // numerically degenerate input

  out.theta_x = rescale_block(point.theta_x, z0.t1, z.t1);
  out.theta_a = set.with_aux_cone ? rescale_block(point.theta_a, z0.t2, z.t2) : point.theta_a;
  out.alpha_aux = z.a;
  out.alpha_lab = z.b;
  return out;
}

// ---------------------------------------------------------------------------
// Dykstra oracle.

namespace {

// Projection onto the second-order cone { (v, w) : ||v|| <= gamma w }.
void soc_project(Vec& v, double& w, double gamma) {
  const double n = p_norm(v, 2.0);
  if (gamma == 0.0) {  // the cone degenerates to {0} x R
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  if (n <= gamma * w) return;
  if (gamma * n <= -w) {
    std::fill(v.begin(), v.end(), 0.0);
    w = 0.0;
    return;
  }
  const double w_new = (gamma * n + w) / (1.0 + gamma * gamma);
  const double f = gamma * w_new / n;
  for (auto& x : v) x *= f;
  w = w_new;
}

struct DykstraState {
  Vec theta_x, theta_a;
  double a = 0.0, b = 0.0;
};

DykstraState to_state(const ModelPoint& p) {
  return {p.theta_x, p.theta_a, p.alpha_aux, p.alpha_lab};
}

DykstraState zero_like(const DykstraState& s) {
  DykstraState z;
  z.theta_x.assign(s.theta_x.size(), 0.0);
  z.theta_a.assign(s.theta_a.size(), 0.0);
  return z;
}

void add(DykstraState& s, const DykstraState& d, double sign) {
  axpy(sign, d.theta_x, s.theta_x);
  axpy(sign, d.theta_a, s.theta_a);
  s.a += sign * d.a;
  s.b += sign * d.b;
}

double max_abs_diff(const DykstraState& s, const DykstraState& t) {
  double m = std::max(std::fabs(s.a - t.a), std::fabs(s.b - t.b));
  for (std::size_t d = 0; d < s.theta_x.size(); ++d)
    m = std::max(m, std::fabs(s.theta_x[d] - t.theta_x[d]));
  for (std::size_t d = 0; d < s.theta_a.size(); ++d)
    m = std::max(m, std::fabs(s.theta_a[d] - t.theta_a[d]));
  return m;
}

// Feature cone { ||theta_x|| <= scale (a + b) }: a rotation of (a, b) turns
// it into a standard second-order cone in (theta_x, (a+b)/sqrt(2)).
void project_feature_cone(DykstraState& s, double scale) {
  const double inv_sqrt2 = 0.7071067811865475244;
  double u = (s.a + s.b) * inv_sqrt2;
  const double r = (s.a - s.b) * inv_sqrt2;
  soc_project(s.theta_x, u, scale * std::sqrt(2.0));
  s.a = (u + r) * inv_sqrt2;
  s.b = (u - r) * inv_sqrt2;
}

void project_aux_cone(DykstraState& s, double kappa) { soc_project(s.theta_a, s.a, kappa); }

// Wedge { 0 <= first <= second } on the alpha pair given by the branch.
void project_wedge(DykstraState& s, Branch branch) {
  double lo = branch == Branch::aux_min ? s.a : s.b;
  double hi = branch == Branch::aux_min ? s.b : s.a;
  double best_lo = 0.0, best_hi = 0.0;
  double best = lo * lo + hi * hi;  // origin candidate
  const auto consider = [&](double cl, double ch) {
    const double d = sqr(cl - lo) + sqr(ch - hi);
    if (d < best) {
      best = d;
      best_lo = cl;
      best_hi = ch;
    }
  };
  if (lo >= 0.0 && lo <= hi) consider(lo, hi);
  if (lo + hi >= 0.0) consider((lo + hi) / 2.0, (lo + hi) / 2.0);
  if (hi >= 0.0) consider(0.0, hi);
  if (branch == Branch::aux_min) {
    s.a = best_lo;
    s.b = best_hi;
  } else {
    s.a = best_hi;
    s.b = best_lo;
  }
}

}  // namespace

ModelPoint project_oracle(const ModelPoint& point, const FeasibleSetSpec& set, double tol,
                          std::size_t max_sweeps) {
  set.validate();
  DykstraState z = to_state(point);
  const std::size_t n_sets = set.with_aux_cone ? 3 : 2;
  std::vector<DykstraState> corrections(n_sets, zero_like(z));

  DykstraState prev = z;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t kset = 0; kset < n_sets; ++kset) {
      add(z, corrections[kset], +1.0);
      DykstraState before = z;
      if (kset == 0)
        project_feature_cone(z, set.scale);
      else if (kset == 1 && set.with_aux_cone)
        project_aux_cone(z, set.kappa_aux);
      else
        project_wedge(z, set.branch);
      corrections[kset] = before;
      add(corrections[kset], z, -1.0);
    }
    if (sweep > 0 && max_abs_diff(z, prev) <= tol) {
      ModelPoint probe = point;
      probe.theta_x = z.theta_x;
      probe.theta_a = z.theta_a;
      probe.alpha_aux = z.a;
      probe.alpha_lab = z.b;
      probe.branch = set.branch;
      if (set_contains(probe, set, 1e-8)) break;
    }
    prev = z;
  }

  ModelPoint out = point;
  out.branch = set.branch;
  out.theta_x = z.theta_x;
  out.theta_a = z.theta_a;
  out.alpha_aux = z.a;
  out.alpha_lab = z.b;
  return out;
}

ModelPoint project_fair(const ModelPoint& point, double scale, Branch branch) {
  FeasibleSetSpec set;
  set.kappa_aux = 0.0;
  set.branch = branch;
  set.scale = scale;
  set.with_aux_cone = false;
  return project(point, set);
}

}  // namespace datajoin
