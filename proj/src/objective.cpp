#include "datajoin/objective.hpp"

#include <algorithm>
#include <cmath>

namespace datajoin {

double logistic_f(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double conjugate_fstar(double b) {
  if (b < 0.0 || b > 1.0) throw std::domain_error("conjugate_fstar: argument outside [0,1]");
  if (b == 0.0 || b == 1.0) return 0.0;
  return b * std::log(b) + (1.0 - b) * std::log(1.0 - b);
}

double robust_label_term(double t, int y, double flip_cost) {
  const double yt = static_cast<double>(y) * t;
  return logistic_f(-yt) + std::max(yt - flip_cost, 0.0);
}

namespace {

// Evaluation anchor of the pair under the branch: the labeled anchor when
// alpha_aux is the smaller scale, the auxiliary anchor otherwise.
std::span<const double> anchor_x(const MatchPair& pair, Branch branch, const AuxDataset& aux,
                                 const LabeledDataset& labeled) {
  return branch == Branch::aux_min ? std::span<const double>(labeled.x[pair.j])
                                   : std::span<const double>(aux.x[pair.i]);
}

double pair_score(const MatchPair& pair, const ModelPoint& model, const AuxDataset& aux,
                  const LabeledDataset& labeled) {
  const auto xhat = anchor_x(pair, model.branch, aux, labeled);
  double t = dot(model.theta_x, xhat);
  if (!model.theta_a.empty()) t += dot(model.theta_a, aux.a[pair.i]);
  return t;
}

double normalizer(const MatchSet& match, const AuxDataset& aux, const LabeledDataset& labeled,
                  const SolverConfig& cfg) {
  if (cfg.normalization == Normalization::match_size) return static_cast<double>(match.pairs.size());
  return static_cast<double>(aux.size()) * static_cast<double>(labeled.size());
}

}  // namespace

double pair_term(const MatchPair& pair, const ModelPoint& model, const AuxDataset& aux,
                 const LabeledDataset& labeled, const SolverConfig& cfg) {
  const double t = pair_score(pair, model, aux, labeled);
  const double term = robust_label_term(t, labeled.y[pair.j], cfg.flip_cost(model.alpha_lab));
  return term - model.alpha_min() * pair.dist;
}

double omega(const ModelPoint& model, const MatchSet& match, const AuxDataset& aux,
             const LabeledDataset& labeled, const SolverConfig& cfg) {
  double sum = 0.0;
  for (const auto& pair : match.pairs) sum += pair_term(pair, model, aux, labeled, cfg);
  return model.alpha_aux * cfg.r_aux + model.alpha_lab * cfg.r_lab +
         sum / normalizer(match, aux, labeled, cfg);
}

Subgradient omega_subgradient(const ModelPoint& model, const MatchSet& match,
                              const AuxDataset& aux, const LabeledDataset& labeled,
                              const SolverConfig& cfg) {
  Subgradient g;
  g.theta_x.assign(model.theta_x.size(), 0.0);
  g.theta_a.assign(model.theta_a.size(), 0.0);
  const double z = normalizer(match, aux, labeled, cfg);
  const double flip_scale = cfg.kappa_lab * (cfg.flip_cost_doubling ? 2.0 : 1.0);
  const double flip_cost = model.alpha_lab * flip_scale;

  double dist_sum = 0.0;
  double flip_count = 0.0;
  for (const auto& pair : match.pairs) {
    const double y = static_cast<double>(labeled.y[pair.j]);
    const double t = pair_score(pair, model, aux, labeled);
    // d/dt of f(-y t) + max(y t - c, 0); strict inequality keeps the
    // zero side at the kink.
    const bool flip_active = y * t - flip_cost > 0.0;
    const double slope = -y * sigmoid(-y * t) + (flip_active ? y : 0.0);
    const auto xhat = anchor_x(pair, model.branch, aux, labeled);
    for (std::size_t d = 0; d < g.theta_x.size(); ++d) g.theta_x[d] += slope * xhat[d];
    if (!g.theta_a.empty()) {
      const auto& a_row = aux.a[pair.i];
      for (std::size_t d = 0; d < g.theta_a.size(); ++d) g.theta_a[d] += slope * a_row[d];
    }
    dist_sum += pair.dist;
    if (flip_active) flip_count += 1.0;
  }
  for (auto& v : g.theta_x) v /= z;
  for (auto& v : g.theta_a) v /= z;

  g.alpha_aux = cfg.r_aux;
  g.alpha_lab = cfg.r_lab - flip_scale * flip_count / z;
  if (model.branch == Branch::aux_min)
    g.alpha_aux -= dist_sum / z;
  else
    g.alpha_lab -= dist_sum / z;
  return g;
}

double sup_upper_bound(std::span<const double> x_i, std::span<const double> x_j,
                       std::span<const double> a_i, int y, const ModelPoint& model,
                       const SolverConfig& cfg) {
  const double dn_x = dual_norm(model.theta_x, cfg.norm.p);
  const double dn_a = dual_norm(model.theta_a, cfg.norm.p_aux);
  const double alpha_sum = model.alpha_aux + model.alpha_lab;
  const double tol = 1e-9;
  if (dn_x > alpha_sum + tol || dn_a > cfg.kappa_aux * model.alpha_aux + tol) return kInfiniteBound;

  const double d_ij = dist_x(x_i, x_j, cfg.norm);
  const double alpha_min = model.alpha_min();
  // The bound machinery is written for the plain argument f(<w, (x,a)>);
  // the loss at label y is f(-y <theta, (x,a)>), so it is applied at
  // w = -y theta. The dual norms are sign-invariant.
  const double ws = -static_cast<double>(y);

  double ratio = 0.0;
  if (alpha_sum > 0.0) {
    double weighted = 0.0;
    for (std::size_t d = 0; d < x_i.size(); ++d)
      weighted += model.theta_x[d] * (model.alpha_aux * x_i[d] + model.alpha_lab * x_j[d]);
    ratio = (alpha_min * dn_x * d_ij + ws * weighted) / alpha_sum;
  } else if (dn_x > 0.0) {
    return kInfiniteBound;
  }
  const double aux_part = model.theta_a.empty() ? 0.0 : ws * dot(model.theta_a, a_i);
  return logistic_f(ratio + aux_part) - alpha_min * d_ij;
}

// ---------------------------------------------------------------------------
// Grid oracle.

namespace {

struct FrontierEntry {
  double arg;   // contribution to the logistic argument
  double cost;  // transport penalty paid for it
};

// Keep only entries that are not dominated (some other entry has argument at
// least as large at no greater cost). Result is sorted by ascending argument
// with strictly decreasing cost.
void pareto_reduce(std::vector<FrontierEntry>& v) {
  std::sort(v.begin(), v.end(), [](const FrontierEntry& a, const FrontierEntry& b) {
    return a.arg > b.arg || (a.arg == b.arg && a.cost < b.cost);
  });
  std::vector<FrontierEntry> keep;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : v) {
    if (e.cost < best) {
      keep.push_back(e);
      best = e.cost;
    }
  }
  std::reverse(keep.begin(), keep.end());
  v = std::move(keep);
}

// Enumerate the lattice of the box [lo, hi]^dim with the given step plus the
// listed extra points, and hand each point to the sink.
template <class Sink>
void for_each_grid_point(const Vec& lo, const Vec& hi, double step, const Matrix& extra,
                         Sink&& sink) {
  const std::size_t dim = lo.size();
  if (dim == 0) {
    sink(Vec{});
    return;
  }
  std::vector<std::size_t> counts(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    if (hi[d] < lo[d]) throw data_error("grid: empty box");
    counts[d] = static_cast<std::size_t>(std::floor((hi[d] - lo[d]) / step + 1e-9)) + 1;
  }
  Vec point(dim);
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    for (std::size_t d = 0; d < dim; ++d) point[d] = lo[d] + static_cast<double>(idx[d]) * step;
    sink(point);
    std::size_t d = 0;
    while (d < dim && ++idx[d] == counts[d]) {
      idx[d] = 0;
      ++d;
    }
    if (d == dim) break;
  }
  for (const auto& p : extra) sink(p);
}

// max over pairs (x-entry, a-entry) of f(x.arg + a.arg) - x.cost - a.cost,
// exact, using monotonicity of the inner argmax (f has increasing
// differences, so the best x-entry index is nondecreasing in a.arg).
class FrontierMax {
 public:
  FrontierMax(const std::vector<FrontierEntry>& xs, const std::vector<FrontierEntry>& as)
      : xs_(xs), as_(as) {
    std::vector<FrontierEntry> a_sorted = as;
    std::sort(a_sorted.begin(), a_sorted.end(),
              [](const FrontierEntry& a, const FrontierEntry& b) { return a.arg < b.arg; });
    as_ = std::move(a_sorted);
    best_ = -std::numeric_limits<double>::infinity();
    if (!xs_.empty() && !as_.empty())
      solve(0, as_.size() - 1, 0, xs_.size() - 1);
  }

  double best() const { return best_; }

 private:
  double value(std::size_t xi, std::size_t ai) const {
    return logistic_f(xs_[xi].arg + as_[ai].arg) - xs_[xi].cost - as_[ai].cost;
  }

  void solve(std::size_t alo, std::size_t ahi, std::size_t xlo, std::size_t xhi) {
    const std::size_t mid = alo + (ahi - alo) / 2;
    std::size_t argmax = xlo;
    double vmax = value(xlo, mid);
    for (std::size_t xi = xlo + 1; xi <= xhi; ++xi) {
      const double v = value(xi, mid);
      if (v >= vmax) {
        vmax = v;
        argmax = xi;
      }
    }
    best_ = std::max(best_, vmax);
    if (mid > alo) solve(alo, mid - 1, xlo, argmax);
    if (mid < ahi) solve(mid + 1, ahi, argmax, xhi);
  }

  std::vector<FrontierEntry> xs_, as_;
  double best_;
};

}  // namespace

double sup_bruteforce(std::span<const double> x_i, std::span<const double> x_j,
                      std::span<const double> a_i, int y, const ModelPoint& model,
                      const SolverConfig& cfg, const GridSpec& grid) {
  const std::size_t m1 = x_i.size(), m2 = a_i.size();
  if (m1 + m2 > 4) throw data_error("sup_bruteforce: grid oracle limited to m1 + m2 <= 4");
  if (grid.lo_x.size() != m1 || grid.hi_x.size() != m1 || grid.lo_a.size() != m2 ||
      grid.hi_a.size() != m2)
    throw data_error("sup_bruteforce: grid box dimension mismatch");
  if (!(grid.step > 0.0)) throw data_error("sup_bruteforce: grid step must be positive");
  const double ys = static_cast<double>(y);

  std::vector<FrontierEntry> xs;
  Matrix extra_x{Vec(x_i.begin(), x_i.end()), Vec(x_j.begin(), x_j.end())};
  for_each_grid_point(grid.lo_x, grid.hi_x, grid.step, extra_x, [&](const Vec& x) {
    FrontierEntry e;
    e.arg = -ys * dot(model.theta_x, x);
    e.cost = model.alpha_aux * dist_x(x, x_i, cfg.norm) + model.alpha_lab * dist_x(x, x_j, cfg.norm);
    xs.push_back(e);
  });

  std::vector<FrontierEntry> as;
  if (m2 == 0) {
    as.push_back({0.0, 0.0});
  } else {
    Matrix extra_a{Vec(a_i.begin(), a_i.end())};
    for_each_grid_point(grid.lo_a, grid.hi_a, grid.step, extra_a, [&](const Vec& a) {
      FrontierEntry e;
      e.arg = -ys * dot(model.theta_a, a);
      Vec diff(m2);
      for (std::size_t d = 0; d < m2; ++d) diff[d] = a[d] - a_i[d];
      e.cost = model.alpha_aux * cfg.kappa_aux * p_norm(diff, cfg.norm.p_aux);
      as.push_back(e);
    });
  }

  pareto_reduce(xs);
  pareto_reduce(as);
  return FrontierMax(xs, as).best();
}

GapCertificate gap_certificate(std::span<const double> x_i, std::span<const double> x_j,
                               std::span<const double> a_i, int y, const ModelPoint& model,
                               const SolverConfig& cfg) {
  const double d_ij = dist_x(x_i, x_j, cfg.norm);
  const auto xhat = model.branch == Branch::aux_min ? x_j : x_i;
  const double ys = static_cast<double>(y);
  double t = dot(model.theta_x, xhat);
  if (!model.theta_a.empty()) t += dot(model.theta_a, a_i);
  GapCertificate c;
  c.lower = logistic_f(-ys * t) - model.alpha_min() * d_ij;
  c.upper = sup_upper_bound(x_i, x_j, a_i, y, model, cfg);
  c.budget = 2.0 * model.alpha_min() * d_ij;
  return c;
}

}  // namespace datajoin
