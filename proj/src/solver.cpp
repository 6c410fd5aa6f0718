#include "datajoin/solver.hpp"

#include <cmath>
#include <string>

namespace datajoin {

namespace {

struct ChainResult {
  ModelPoint candidate;
  double objective = 0.0;
  Vec trace;
  double min_slack = 0.0;
};

ModelPoint initial_point(const AuxDataset& aux, const LabeledDataset& labeled,
                         const SolverConfig& cfg, const ModelPoint* init, Branch branch) {
  ModelPoint p;
  if (init) {
    p = *init;
    if (p.theta_x.size() != labeled.dim() || p.theta_a.size() != aux.dim_a())
      throw data_error("train: init point dimension mismatch");
  } else {
    // theta = 0 with equal small alphas is feasible for both branches.
    p.theta_x.assign(labeled.dim(), 0.0);
    p.theta_a.assign(aux.dim_a(), 0.0);
    p.alpha_aux = cfg.init_alpha;
    p.alpha_lab = cfg.init_alpha;
  }
  p.branch = branch;
  return p;
}

ChainResult run_chain(const AuxDataset& aux, const LabeledDataset& labeled, const MatchSet& match,
                      const SolverConfig& cfg, const ModelPoint* init, Branch branch) {
  FeasibleSetSpec set;
  set.kappa_aux = cfg.kappa_aux;
  set.branch = branch;

  ChainResult res;
  res.min_slack = std::numeric_limits<double>::infinity();
  ModelPoint z = project(initial_point(aux, labeled, cfg, init, branch), set);

  ModelPoint avg = z;
  const double t_count = static_cast<double>(cfg.iterations);
  res.trace.reserve(cfg.iterations);

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double value = omega(z, match, aux, labeled, cfg);
    if (!std::isfinite(value))
      throw numeric_error("train: objective is not finite at iteration " + std::to_string(t) +
                          " (" + branch_name(branch) + " chain)");
    res.trace.push_back(value);
    res.min_slack = std::min(res.min_slack, feasibility_slack(z, cfg));

    if (t == cfg.iterations) break;
    const Subgradient g = omega_subgradient(z, match, aux, labeled, cfg);
    const double eta = cfg.step_decay ? cfg.step_size / std::sqrt(static_cast<double>(t))
                                      : cfg.step_size;
    axpy(-eta, g.theta_x, z.theta_x);
    axpy(-eta, g.theta_a, z.theta_a);
    z.alpha_aux -= eta * g.alpha_aux;
    z.alpha_lab -= eta * g.alpha_lab;
    z = project(z, set);

    axpy(1.0, z.theta_x, avg.theta_x);
    axpy(1.0, z.theta_a, avg.theta_a);
    avg.alpha_aux += z.alpha_aux;
    avg.alpha_lab += z.alpha_lab;
  }

  if (cfg.iterate == IterateMode::averaged) {
    for (auto& v : avg.theta_x) v /= t_count;
    for (auto& v : avg.theta_a) v /= t_count;
    avg.alpha_aux /= t_count;
    avg.alpha_lab /= t_count;
    res.candidate = avg;  // convex combination of feasible iterates
  } else {
    res.candidate = z;
  }
  res.objective = omega(res.candidate, match, aux, labeled, cfg);
  return res;
}

}  // namespace

TrainedModel train(const AuxDataset& aux, const LabeledDataset& labeled, const SolverConfig& cfg,
                   const ModelPoint* init) {
  cfg.validate();
  aux.validate();
  labeled.validate();
  if (aux.dim_x() != labeled.dim()) throw data_error("train: feature dimension mismatch");

  TrainedModel out;
  out.config = cfg;
  if (cfg.compute_certificate) {
    out.certificate = check_feasibility(aux, labeled, cfg.r_aux, cfg.r_lab, cfg.norm);
    out.feasibility_warning = !out.certificate->feasible;
  }

  const MatchSet match = build_match_set(aux, labeled, cfg.k, cfg.norm);
  const ChainResult chain_aux = run_chain(aux, labeled, match, cfg, init, Branch::aux_min);
  const ChainResult chain_lab = run_chain(aux, labeled, match, cfg, init, Branch::lab_min);

  const bool aux_wins = chain_aux.objective <= chain_lab.objective;
  const ChainResult& winner = aux_wins ? chain_aux : chain_lab;
  out.model = winner.candidate;
  out.objective = winner.objective;
  out.trace_aux_branch = chain_aux.trace;
  out.trace_lab_branch = chain_lab.trace;
  out.min_iterate_slack = std::min(chain_aux.min_slack, chain_lab.min_slack);
  return out;
}

Prediction predict(const ModelPoint& model, std::span<const double> x, std::span<const double> a) {
  if (x.size() != model.theta_x.size()) throw data_error("predict: feature dimension mismatch");
  if (a.size() != model.theta_a.size()) throw data_error("predict: auxiliary dimension mismatch");
  Prediction p;
  p.score = dot(model.theta_x, x);
  if (!a.empty()) p.score += dot(model.theta_a, a);
  p.label = p.score >= 0.0 ? +1 : -1;
  return p;
}

}  // namespace datajoin
