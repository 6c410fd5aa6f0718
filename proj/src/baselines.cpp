#include "datajoin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datajoin/geometry.hpp"
#include "datajoin/objective.hpp"

namespace datajoin {

namespace {

double mean_logistic_loss(const LabeledDataset& d, const Vec& theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    s += logistic_f(-static_cast<double>(d.y[i]) * dot(theta, d.x[i]));
  return s / static_cast<double>(d.size());
}

Vec mean_logistic_grad(const LabeledDataset& d, const Vec& theta) {
  Vec g(theta.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = static_cast<double>(d.y[i]);
    const double w = -y * sigmoid(-y * dot(theta, d.x[i]));
    axpy(w, d.x[i], g);
  }
  for (auto& v : g) v /= static_cast<double>(d.size());
  return g;
}

void check_finite(double v, std::size_t t, const char* what) {
  if (!std::isfinite(v))
    throw numeric_error(std::string(what) + ": objective is not finite at iteration " +
                        std::to_string(t));
}

}  // namespace

BaselineModel train_lr(const LabeledDataset& data, const BaselineConfig& cfg) {
  cfg.validate();
  data.validate();
  BaselineModel m;
  m.theta.assign(data.dim(), 0.0);
  m.trace.reserve(cfg.iterations);
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double value = mean_logistic_loss(data, m.theta);
    check_finite(value, t, "lr");
    m.trace.push_back(value);
    if (t == cfg.iterations) break;
    const Vec g = mean_logistic_grad(data, m.theta);
    axpy(-cfg.step_size, g, m.theta);
  }
  m.objective = mean_logistic_loss(data, m.theta);
  return m;
}

BaselineModel train_rlr(const LabeledDataset& data, const BaselineConfig& cfg) {
  cfg.validate();
  data.validate();
  BaselineModel m;
  m.theta.assign(data.dim(), 0.0);
  m.trace.reserve(cfg.iterations);
  const auto penalty = [&](const Vec& theta) {
    const double n = p_norm(theta, 2.0);
    return cfg.squared_penalty ? cfg.lambda_reg * n * n : cfg.lambda_reg * n;
  };
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double value = mean_logistic_loss(data, m.theta) + penalty(m.theta);
    check_finite(value, t, "rlr");
    m.trace.push_back(value);
    if (t == cfg.iterations) break;
    Vec g = mean_logistic_grad(data, m.theta);
    if (cfg.squared_penalty) {
      axpy(2.0 * cfg.lambda_reg, m.theta, g);
      axpy(-cfg.step_size, g, m.theta);
    } else {
      // proximal step for the nonsmooth norm penalty: gradient step on the
      // loss, then shrink the norm by step * lambda. Keeps theta = 0 a fixed
      // point whenever the loss gradient is inside the penalty's
      // subdifferential, where a raw subgradient step would oscillate.
      axpy(-cfg.step_size, g, m.theta);
      const double n = p_norm(m.theta, 2.0);
      const double shrink = std::max(n - cfg.step_size * cfg.lambda_reg, 0.0);
      const double f = n > 0.0 ? shrink / n : 0.0;
      for (auto& v : m.theta) v *= f;
    }
  }
  m.objective = mean_logistic_loss(data, m.theta) + penalty(m.theta);
  return m;
}

void project_norm_cone(Vec& theta, double& s) {
  const double n = p_norm(theta, 2.0);
  if (n <= s) return;
  if (n <= -s) {
    std::fill(theta.begin(), theta.end(), 0.0);
    s = 0.0;
    return;
  }
  const double s_new = (n + s) / 2.0;
  const double f = n > 0.0 ? s_new / n : 0.0;
  for (auto& v : theta) v *= f;
  s = s_new;
}

BaselineModel train_drlr(const LabeledDataset& data, const BaselineConfig& cfg) {
  cfg.validate();
  data.validate();
  BaselineModel m;
  m.theta.assign(data.dim(), 0.0);
  m.dual_scale = 1e-3;
  m.trace.reserve(cfg.iterations);
  const double n = static_cast<double>(data.size());

  const auto objective = [&](const Vec& theta, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
      sum += robust_label_term(dot(theta, data.x[i]), data.y[i], s * cfg.kappa);
    return s * cfg.r + sum / n;
  };

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double value = objective(m.theta, m.dual_scale);
    check_finite(value, t, "drlr");
    m.trace.push_back(value);
    if (t == cfg.iterations) break;

    Vec g(m.theta.size(), 0.0);
    double flip_count = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double y = static_cast<double>(data.y[i]);
      const double yt = y * dot(m.theta, data.x[i]);
      const bool flip = yt - m.dual_scale * cfg.kappa > 0.0;
      const double slope = -y * sigmoid(-yt) + (flip ? y : 0.0);
      axpy(slope, data.x[i], g);
      if (flip) flip_count += 1.0;
    }
    for (auto& v : g) v /= n;
    const double g_s = cfg.r - cfg.kappa * flip_count / n;

    axpy(-cfg.step_size, g, m.theta);
    m.dual_scale -= cfg.step_size * g_s;
    project_norm_cone(m.theta, m.dual_scale);
  }
  m.objective = objective(m.theta, m.dual_scale);
  return m;
}

BaselineModel train_baseline(const LabeledDataset& data, const BaselineConfig& cfg) {
  switch (cfg.kind) {
    case BaselineKind::lr:
      return train_lr(data, cfg);
    case BaselineKind::rlr:
      return train_rlr(data, cfg);
    case BaselineKind::drlr:
      return train_drlr(data, cfg);
  }
  throw data_error("baseline: unknown kind");
}

}  // namespace datajoin
