#pragma once

#include "datajoin/common.hpp"
#include "datajoin/dataset.hpp"

namespace datajoin {

enum class BaselineKind { lr, rlr, drlr };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::lr;
  double lambda_reg = 0.0;      // rlr penalty weight
  bool squared_penalty = false; // rlr: lambda ||theta||^2 instead of lambda ||theta||
  double r = 0.0;               // drlr radius
  double kappa = 1.0;           // drlr label-flip weight
  std::size_t iterations = 1500;
  double step_size = 7e-2;

  void validate() const {
    if (lambda_reg < 0.0 || r < 0.0 || kappa < 0.0)
      throw data_error("baseline config: penalties must be nonnegative");
    if (iterations < 1 || !(step_size > 0.0)) throw data_error("baseline config: bad schedule");
  }
};

struct BaselineModel {
  Vec theta;
  double dual_scale = 0.0;  // drlr only: the norm budget variable
  double objective = 0.0;
  Vec trace;
};

// Plain logistic regression, gradient descent from zero.
BaselineModel train_lr(const LabeledDataset& data, const BaselineConfig& cfg);

// Norm-regularized logistic regression (subgradient 0 for the penalty at
// theta = 0; squared penalty available behind the config flag).
BaselineModel train_rlr(const LabeledDataset& data, const BaselineConfig& cfg);

// Single-anchor distributionally robust logistic regression:
//   min_{theta, s : ||theta|| <= s}  s r + mean_i max(f(-y_i t_i), f(y_i t_i) - s kappa),
// solved by projected gradient descent with the exact cone projection.
BaselineModel train_drlr(const LabeledDataset& data, const BaselineConfig& cfg);

BaselineModel train_baseline(const LabeledDataset& data, const BaselineConfig& cfg);

// Exact Euclidean projection onto { (theta, s) : ||theta||_2 <= s }.
void project_norm_cone(Vec& theta, double& s);

}  // namespace datajoin
