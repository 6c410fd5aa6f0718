#pragma once

#include <optional>

#include "datajoin/dataset.hpp"
#include "datajoin/geometry.hpp"
#include "datajoin/model.hpp"
#include "datajoin/solver.hpp"

namespace datajoin {

// Configuration of the fairness-regularized program. The auxiliary feature
// is a single binary group indicator; p0 and p1 are the known positive rates
// of the two (group, y=+1) cells under the target distribution.
struct FairnessConfig {
  double eta = 0.0;  // fairness penalty weight, |eta| < min(p0, p1)
  double p0 = 0.5;
  double p1 = 0.5;

  void validate() const {
    if (!(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0))
      throw data_error("fairness: p0, p1 must lie in (0,1)");
    if (p0 + p1 > 1.0) throw data_error("fairness: p0 + p1 must not exceed 1");
    if (!(std::fabs(eta) < std::min(p0, p1)))
      throw data_error("fairness: |eta| must be below min(p0, p1)");
  }
};

// Positive reweighting that folds the fairness penalty into the loss:
// 1 - 1[y=1] eta (1[a=1]/p1 - 1[a=0]/p0). Strictly positive whenever
// |eta| < min(p0, p1).
double c_weight(int a, int y, double eta, const FairnessConfig& cfg);

// Largest c over the four (a, y) cells for the given penalty sign; scales
// the feature-cone budget of the projection.
double c_bar(double eta, const FairnessConfig& cfg);

struct FairModelPoint {
  ModelPoint base;     // theta_a holds the single group coefficient
  double gamma0 = 0.0; // free multipliers of the positive-rate constraints
  double gamma1 = 0.0;
};

// Per-pair summand of the fairness surrogate: worst case over the four
// (group, label) cells of the reweighted loss net of transport costs and
// rate multipliers, minus min(alpha) * d_ij.
double fair_pair_term(const MatchPair& pair, const FairModelPoint& point, const AuxDataset& aux,
                      const LabeledDataset& labeled, double eta, const FairnessConfig& fair,
                      const SolverConfig& cfg);

// Fairness surrogate objective for one penalty sign.
double omega_fair(const FairModelPoint& point, const MatchSet& match, const AuxDataset& aux,
                  const LabeledDataset& labeled, double eta, const FairnessConfig& fair,
                  const SolverConfig& cfg);

struct TrainedFairModel {
  FairModelPoint point;
  double objective = 0.0;  // max over the two penalty signs at the final point
  Vec trace_aux_branch;
  Vec trace_lab_branch;
  SolverConfig config;
  FairnessConfig fairness;
  double c_bar_final = 0.0;  // scale used at the returned point
  std::optional<FeasibilityCertificate> certificate;
  bool feasibility_warning = false;
};

// Two-branch projected subgradient descent on
// max(omega_fair(+eta), omega_fair(-eta)); each step follows the sign that
// attains the pointwise max and projects with that sign's scaled cone.
TrainedFairModel train_fair(const AuxDataset& aux, const LabeledDataset& labeled,
                            const SolverConfig& cfg, const FairnessConfig& fair);

// Empirical log-probabilistic equalized opportunity of theta_x on labeled,
// grouped data: |mean log h(x) over (a=1, y=1) - mean log h(x) over
// (a=0, y=1)| with h the logistic score on the shared features.
double unfairness_empirical(const Vec& theta_x, const Matrix& x, const std::vector<int>& group,
                            const std::vector<int>& y);

// Grid oracle for the fairness bound checks: sup over the feature box of
// c * f(-y(<theta_x, x> + theta_a * a)) - alpha_aux ||x - x_i|| -
// alpha_lab ||x - x_j|| for one fixed cell (a, y).
double fair_sup_bruteforce(std::span<const double> x_i, std::span<const double> x_j, int a, int y,
                           const FairModelPoint& point, double eta, const FairnessConfig& fair,
                           const SolverConfig& cfg, const Vec& lo_x, const Vec& hi_x, double step);

}  // namespace datajoin
