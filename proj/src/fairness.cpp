#include "datajoin/fairness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "datajoin/objective.hpp"
#include "datajoin/projection.hpp"

namespace datajoin {

double c_weight(int a, int y, double eta, const FairnessConfig& cfg) {
  cfg.validate();
  if (y != 1) return 1.0;
  return 1.0 - eta * (a == 1 ? 1.0 / cfg.p1 : -1.0 / cfg.p0);
}

double c_bar(double eta, const FairnessConfig& cfg) {
  double m = 0.0;
  for (const int a : {0, 1})
    for (const int y : {-1, +1}) m = std::max(m, c_weight(a, y, eta, cfg));
  return m;
}

namespace {

struct Cell {
  int a;
  int y;
};

// Enumeration order puts the unperturbed cell first so exact ties resolve to
// the zero-penalty side, mirroring the kink convention of the plain term.
std::array<Cell, 4> cell_order(int a_i, int y_j) {
  const int a_far = 1 - a_i;
  return {Cell{a_i, y_j}, Cell{a_i, -y_j}, Cell{a_far, y_j}, Cell{a_far, -y_j}};
}

int group_of(const AuxDataset& aux, std::size_t i) {
  if (aux.dim_a() != 1) throw data_error("fairness: auxiliary block must be the binary group");
  const double v = aux.a[i][0];
  if (v != 0.0 && v != 1.0) throw data_error("fairness: group values must be 0 or 1");
  return static_cast<int>(v);
}

struct CellValue {
  double value;
  Cell cell;
  double t;  // model score at the cell
};

CellValue best_cell(const MatchPair& pair, const FairModelPoint& point, const AuxDataset& aux,
                    const LabeledDataset& labeled, double eta, const FairnessConfig& fair,
                    const SolverConfig& cfg) {
  const ModelPoint& m = point.base;
  const auto& xhat = m.branch == Branch::aux_min ? labeled.x[pair.j] : aux.x[pair.i];
  const double base_score = dot(m.theta_x, xhat);
  const double theta_group = m.theta_a.empty() ? 0.0 : m.theta_a[0];
  const int a_i = group_of(aux, pair.i);
  const int y_j = labeled.y[pair.j];
  const double flip_cost = cfg.flip_cost(m.alpha_lab);

  CellValue best{-std::numeric_limits<double>::infinity(), {a_i, y_j}, 0.0};
  for (const Cell& c : cell_order(a_i, y_j)) {
    const double t = base_score + theta_group * static_cast<double>(c.a);
    double v = c_weight(c.a, c.y, eta, fair) * logistic_f(-static_cast<double>(c.y) * t);
    v -= m.alpha_aux * cfg.kappa_aux * std::abs(a_i - c.a);
    if (c.y != y_j) v -= flip_cost;
    if (c.y == 1) v -= c.a == 0 ? point.gamma0 : point.gamma1;
    if (v > best.value) best = {v, c, t};
  }
  return best;
}

}  // namespace

double fair_pair_term(const MatchPair& pair, const FairModelPoint& point, const AuxDataset& aux,
                      const LabeledDataset& labeled, double eta, const FairnessConfig& fair,
                      const SolverConfig& cfg) {
  const CellValue best = best_cell(pair, point, aux, labeled, eta, fair, cfg);
  return best.value - point.base.alpha_min() * pair.dist;
}

double omega_fair(const FairModelPoint& point, const MatchSet& match, const AuxDataset& aux,
                  const LabeledDataset& labeled, double eta, const FairnessConfig& fair,
                  const SolverConfig& cfg) {
  double sum = 0.0;
  for (const auto& pair : match.pairs) sum += fair_pair_term(pair, point, aux, labeled, eta, fair, cfg);
  const double z = cfg.normalization == Normalization::match_size
                       ? static_cast<double>(match.pairs.size())
                       : static_cast<double>(aux.size()) * static_cast<double>(labeled.size());
  return point.base.alpha_aux * cfg.r_aux + point.base.alpha_lab * cfg.r_lab +
         fair.p0 * point.gamma0 + fair.p1 * point.gamma1 + sum / z;
}

namespace {

struct FairGradient {
  Vec theta_x;
  double theta_group = 0.0;
  double alpha_aux = 0.0, alpha_lab = 0.0;
  double gamma0 = 0.0, gamma1 = 0.0;
};

FairGradient fair_subgradient(const FairModelPoint& point, const MatchSet& match,
                              const AuxDataset& aux, const LabeledDataset& labeled, double eta,
                              const FairnessConfig& fair, const SolverConfig& cfg) {
  const ModelPoint& m = point.base;
  FairGradient g;
  g.theta_x.assign(m.theta_x.size(), 0.0);
  const double z = cfg.normalization == Normalization::match_size
                       ? static_cast<double>(match.pairs.size())
                       : static_cast<double>(aux.size()) * static_cast<double>(labeled.size());
  const double flip_scale = cfg.kappa_lab * (cfg.flip_cost_doubling ? 2.0 : 1.0);

  double dist_sum = 0.0;
  for (const auto& pair : match.pairs) {
    const CellValue best = best_cell(pair, point, aux, labeled, eta, fair, cfg);
    const double y = static_cast<double>(best.cell.y);
    const double slope =
        c_weight(best.cell.a, best.cell.y, eta, fair) * (-y) * sigmoid(-y * best.t);
    const auto& xhat = m.branch == Branch::aux_min ? labeled.x[pair.j] : aux.x[pair.i];
    for (std::size_t d = 0; d < g.theta_x.size(); ++d) g.theta_x[d] += slope * xhat[d];
    g.theta_group += slope * static_cast<double>(best.cell.a);

    const int a_i = group_of(aux, pair.i);
    g.alpha_aux -= cfg.kappa_aux * std::abs(a_i - best.cell.a);
    if (best.cell.y != labeled.y[pair.j]) g.alpha_lab -= flip_scale;
    if (best.cell.y == 1) {
      if (best.cell.a == 0)
        g.gamma0 -= 1.0;
      else
        g.gamma1 -= 1.0;
    }
    dist_sum += pair.dist;
  }
  for (auto& v : g.theta_x) v /= z;
  g.theta_group /= z;
  g.alpha_aux /= z;
  g.alpha_lab /= z;
  g.gamma0 = fair.p0 + g.gamma0 / z;
  g.gamma1 = fair.p1 + g.gamma1 / z;
  g.alpha_aux += cfg.r_aux;
  g.alpha_lab += cfg.r_lab;
  if (m.branch == Branch::aux_min)
    g.alpha_aux -= dist_sum / z;
  else
    g.alpha_lab -= dist_sum / z;
  return g;
}

struct FairChain {
  FairModelPoint candidate;
  double objective = 0.0;
  Vec trace;
  double c_bar_final = 0.0;
};

FairChain run_fair_chain(const AuxDataset& aux, const LabeledDataset& labeled,
                         const MatchSet& match, const SolverConfig& cfg,
                         const FairnessConfig& fair, Branch branch) {
  FairModelPoint z;
  z.base.theta_x.assign(labeled.dim(), 0.0);
  z.base.theta_a.assign(1, 0.0);
  z.base.alpha_aux = cfg.init_alpha;
  z.base.alpha_lab = cfg.init_alpha;
  z.base.branch = branch;
  z.base = project_fair(z.base, 1.0 / c_bar(fair.eta, fair), branch);

  FairChain res;
  FairModelPoint avg = z;
  res.trace.reserve(cfg.iterations);
  double active_eta = fair.eta;

  const auto value_at = [&](const FairModelPoint& p, double* out_eta) {
    const double v_pos = omega_fair(p, match, aux, labeled, fair.eta, fair, cfg);
    const double v_neg = omega_fair(p, match, aux, labeled, -fair.eta, fair, cfg);
    if (out_eta) *out_eta = v_pos >= v_neg ? fair.eta : -fair.eta;
    return std::max(v_pos, v_neg);
  };

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double value = value_at(z, &active_eta);
    if (!std::isfinite(value))
      throw numeric_error("train_fair: objective is not finite at iteration " + std::to_string(t));
    res.trace.push_back(value);
    if (t == cfg.iterations) break;

    const FairGradient g = fair_subgradient(z, match, aux, labeled, active_eta, fair, cfg);
    const double eta_step = cfg.step_decay ? cfg.step_size / std::sqrt(static_cast<double>(t))
                                           : cfg.step_size;
    axpy(-eta_step, g.theta_x, z.base.theta_x);
    z.base.theta_a[0] -= eta_step * g.theta_group;
    z.base.alpha_aux -= eta_step * g.alpha_aux;
    z.base.alpha_lab -= eta_step * g.alpha_lab;
    z.gamma0 -= eta_step * g.gamma0;
    z.gamma1 -= eta_step * g.gamma1;
    z.base = project_fair(z.base, 1.0 / c_bar(active_eta, fair), branch);

    axpy(1.0, z.base.theta_x, avg.base.theta_x);
    avg.base.theta_a[0] += z.base.theta_a[0];
    avg.base.alpha_aux += z.base.alpha_aux;
    avg.base.alpha_lab += z.base.alpha_lab;
    avg.gamma0 += z.gamma0;
    avg.gamma1 += z.gamma1;
  }

  if (cfg.iterate == IterateMode::averaged) {
    const double t_count = static_cast<double>(cfg.iterations);
    for (auto& v : avg.base.theta_x) v /= t_count;
    avg.base.theta_a[0] /= t_count;
    avg.base.alpha_aux /= t_count;
    avg.base.alpha_lab /= t_count;
    avg.gamma0 /= t_count;
    avg.gamma1 /= t_count;
    res.candidate = avg;
  } else {
    res.candidate = z;
  }
  double final_eta = fair.eta;
  res.objective = value_at(res.candidate, &final_eta);
  res.c_bar_final = c_bar(final_eta, fair);
  return res;
}

}  // namespace

TrainedFairModel train_fair(const AuxDataset& aux, const LabeledDataset& labeled,
                            const SolverConfig& cfg, const FairnessConfig& fair) {
  cfg.validate();
  fair.validate();
  aux.validate();
  labeled.validate();
  if (aux.dim_a() != 1) throw data_error("train_fair: auxiliary block must be the binary group");
  for (std::size_t i = 0; i < aux.size(); ++i) group_of(aux, i);

  TrainedFairModel out;
  out.config = cfg;
  out.fairness = fair;
  if (cfg.compute_certificate) {
    out.certificate = check_feasibility(aux, labeled, cfg.r_aux, cfg.r_lab, cfg.norm);
    out.feasibility_warning = !out.certificate->feasible;
  }

  const MatchSet match = build_match_set(aux, labeled, cfg.k, cfg.norm);
  const FairChain chain_aux = run_fair_chain(aux, labeled, match, cfg, fair, Branch::aux_min);
  const FairChain chain_lab = run_fair_chain(aux, labeled, match, cfg, fair, Branch::lab_min);
  const FairChain& winner = chain_aux.objective <= chain_lab.objective ? chain_aux : chain_lab;
  out.point = winner.candidate;
  out.objective = winner.objective;
  out.c_bar_final = winner.c_bar_final;
  out.trace_aux_branch = chain_aux.trace;
  out.trace_lab_branch = chain_lab.trace;
  return out;
}

double unfairness_empirical(const Vec& theta_x, const Matrix& x, const std::vector<int>& group,
                            const std::vector<int>& y) {
  if (x.size() != group.size() || x.size() != y.size())
    throw data_error("unfairness: row count mismatch");
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] != 1) continue;
    const double log_h = -logistic_f(-dot(theta_x, x[i]));  // log of the logistic score
    if (group[i] == 1) {
      sum1 += log_h;
      ++n1;
    } else {
      sum0 += log_h;
      ++n0;
    }
  }
  if (n0 == 0 || n1 == 0)
    throw data_error("unfairness: a (group, y=1) cell is empty, the measure is undefined");
  return std::fabs(sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0));
}

double fair_sup_bruteforce(std::span<const double> x_i, std::span<const double> x_j, int a, int y,
                           const FairModelPoint& point, double eta, const FairnessConfig& fair,
                           const SolverConfig& cfg, const Vec& lo_x, const Vec& hi_x, double step) {
  const std::size_t m1 = x_i.size();
  if (m1 > 4) throw data_error("fair_sup_bruteforce: grid oracle limited to m1 <= 4");
  if (lo_x.size() != m1 || hi_x.size() != m1 || !(step > 0.0))
    throw data_error("fair_sup_bruteforce: bad grid box");
  const ModelPoint& m = point.base;
  const double c = c_weight(a, y, eta, fair);
  const double theta_group = m.theta_a.empty() ? 0.0 : m.theta_a[0];
  const double ys = static_cast<double>(y);

  double best = -std::numeric_limits<double>::infinity();
  const auto eval = [&](const Vec& x) {
    const double t = dot(m.theta_x, x) + theta_group * static_cast<double>(a);
    const double v = c * logistic_f(-ys * t) - m.alpha_aux * dist_x(x, x_i, cfg.norm) -
                     m.alpha_lab * dist_x(x, x_j, cfg.norm);
    best = std::max(best, v);
  };

  std::vector<std::size_t> counts(m1);
  for (std::size_t d = 0; d < m1; ++d) {
    if (hi_x[d] < lo_x[d]) throw data_error("fair_sup_bruteforce: empty box");
    counts[d] = static_cast<std::size_t>(std::floor((hi_x[d] - lo_x[d]) / step + 1e-9)) + 1;
  }
  Vec pt(m1);
  std::vector<std::size_t> idx(m1, 0);
  while (true) {
    for (std::size_t d = 0; d < m1; ++d) pt[d] = lo_x[d] + static_cast<double>(idx[d]) * step;
    eval(pt);
    std::size_t d = 0;
    while (d < m1 && ++idx[d] == counts[d]) {
      idx[d] = 0;
      ++d;
    }
    if (d == m1) break;
  }
  eval(Vec(x_i.begin(), x_i.end()));
  eval(Vec(x_j.begin(), x_j.end()));
  return best;
}

}  // namespace datajoin
