#pragma once

#include <optional>

#include "datajoin/dataset.hpp"
#include "datajoin/geometry.hpp"
#include "datajoin/model.hpp"
#include "datajoin/objective.hpp"
#include "datajoin/projection.hpp"

namespace datajoin {

struct TrainedModel {
  ModelPoint model;
  double objective = 0.0;
  Vec trace_aux_branch;  // objective value per iteration, aux_min chain
  Vec trace_lab_branch;  // objective value per iteration, lab_min chain
  double min_iterate_slack = 0.0;  // worst feasibility slack seen along both chains
  SolverConfig config;
  std::optional<FeasibilityCertificate> certificate;
  bool feasibility_warning = false;  // radii too small for the ambiguity set to be nonempty
  StandardizationStats stats_x;      // filled by the harness when it standardizes
  StandardizationStats stats_a;
};

// Two-chain projected subgradient descent on the surrogate: one chain per
// branch of the feasible region, both started from the same point; the
// returned model is the better of the two per-branch candidates (last or
// averaged iterate per config). When the feasibility certificate fails the
// training still runs, but the result carries a warning: the exact worst
// case is unbounded and the surrogate value is a study quantity only.
TrainedModel train(const AuxDataset& aux, const LabeledDataset& labeled, const SolverConfig& cfg,
                   const ModelPoint* init = nullptr);

struct Prediction {
  double score = 0.0;
  int label = +1;
};

// sign(<theta_x, x> + <theta_a, a>), ties to +1. Inputs must be standardized
// with the model's stats.
Prediction predict(const ModelPoint& model, std::span<const double> x, std::span<const double> a);

}  // namespace datajoin
