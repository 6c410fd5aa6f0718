#pragma once

#include <cstdint>
#include <string>

#include "datajoin/common.hpp"
#include "datajoin/geometry.hpp"

namespace datajoin {

// The two halves of the feasible region. The objective depends on
// min(alpha_aux, alpha_lab), so the solver runs once constraining each dual
// scale to be the smaller and keeps the better result.
enum class Branch { aux_min, lab_min };

inline std::string branch_name(Branch b) { return b == Branch::aux_min ? "aux_min" : "lab_min"; }

// One iterate of the projected descent: feature and auxiliary coefficient
// blocks plus the two dual scales that price the Wasserstein radii.
struct ModelPoint {
  Vec theta_x;
  Vec theta_a;
  double alpha_aux = 0.0;
  double alpha_lab = 0.0;
  Branch branch = Branch::aux_min;

  double alpha_min() const { return alpha_aux < alpha_lab ? alpha_aux : alpha_lab; }
};

enum class Normalization { pair_product, match_size };
enum class IterateMode { last, averaged };

struct SolverConfig {
  double r_aux = 0.0;
  double r_lab = 0.0;
  double kappa_aux = 1.0;
  double kappa_lab = 1.0;
  std::size_t k = 1;
  std::size_t iterations = 1500;
  double step_size = 7e-2;
  bool step_decay = false;  // eta_t = eta / sqrt(t) when set
  NormSpec norm;
  Normalization normalization = Normalization::pair_product;
  IterateMode iterate = IterateMode::last;
  bool flip_cost_doubling = false;  // price a label flip at 2 * alpha_lab * kappa_lab
  double init_alpha = 1e-3;
  bool compute_certificate = true;

  void validate() const {
    norm.validate();
    if (r_aux < 0.0 || r_lab < 0.0) throw data_error("config: radii must be nonnegative");
    if (kappa_aux < 0.0 || kappa_lab < 0.0) throw data_error("config: kappas must be nonnegative");
    if (k < 1) throw data_error("config: k must be at least 1");
    if (iterations < 1) throw data_error("config: iteration count must be at least 1");
    if (!(step_size > 0.0)) throw data_error("config: step size must be positive");
  }

  double flip_cost(double alpha_lab) const {
    return alpha_lab * kappa_lab * (flip_cost_doubling ? 2.0 : 1.0);
  }
};

// Constraint slack of the surrogate's feasible set at the given point;
// nonnegative (up to tolerance) iff the point is feasible. The dual-norm
// budgets come from the surrogate's constraints, the order constraint from
// the branch.
inline double feasibility_slack(const ModelPoint& m, const SolverConfig& cfg) {
  double slack = (m.alpha_aux + m.alpha_lab) - dual_norm(m.theta_x, cfg.norm.p);
  slack = std::min(slack, cfg.kappa_aux * m.alpha_aux - dual_norm(m.theta_a, cfg.norm.p_aux));
  slack = std::min(slack, m.branch == Branch::aux_min ? m.alpha_lab - m.alpha_aux
                                                      : m.alpha_aux - m.alpha_lab);
  slack = std::min(slack, std::min(m.alpha_aux, m.alpha_lab));
  return slack;
}

inline bool model_feasible(const ModelPoint& m, const SolverConfig& cfg, double tol = 1e-9) {
  return feasibility_slack(m, cfg) >= -tol;
}

}  // namespace datajoin
