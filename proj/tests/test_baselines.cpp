#include <cmath>

#include "doctest.h"

#include "datajoin/baselines.hpp"
#include "datajoin/geometry.hpp"
#include "datajoin/objective.hpp"
#include "datajoin/rng.hpp"

using namespace datajoin;

namespace {

LabeledDataset random_labeled(Rng& rng, std::size_t n, std::size_t dim) {
  LabeledDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? 1 : -1;
    Vec x(dim);
    for (auto& v : x) v = y * 0.8 + 0.6 * rng.normal();
    d.x.push_back(std::move(x));
    d.y.push_back(y);
  }
  return d;
}

}  // namespace

TEST_CASE("lr: zero model scores ln 2") {
  LabeledDataset d;
  d.x = {{1.0, 0.0}, {-1.0, 2.0}};
  d.y = {1, -1};
  BaselineConfig cfg;
  cfg.iterations = 1;
  const BaselineModel m = train_lr(d, cfg);
  CHECK(m.objective == doctest::Approx(0.6931471805599453));
}

TEST_CASE("lr: gradient at zero, explicit check") {
  LabeledDataset d;
  d.x = {{1.0, 2.0}, {0.5, -1.0}, {-2.0, 0.0}};
  d.y = {1, -1, -1};
  BaselineConfig cfg;
  cfg.iterations = 2;
  cfg.step_size = 1.0;
  const BaselineModel m = train_lr(d, cfg);
  Vec expected(2, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t c = 0; c < 2; ++c) expected[c] += d.y[i] * d.x[i][c] / 2.0;
  for (auto& v : expected) v /= static_cast<double>(d.size());
  CHECK(m.theta[0] == doctest::Approx(expected[0]).epsilon(1e-12));
  CHECK(m.theta[1] == doctest::Approx(expected[1]).epsilon(1e-12));
}

TEST_CASE("lr: separable 1-d data trains to small loss") {
  LabeledDataset d;
  d.x = {{-1.0}, {1.0}};
  d.y = {-1, 1};
  BaselineConfig cfg;
  cfg.iterations = 2000;
  cfg.step_size = 7e-2;
  const BaselineModel m = train_lr(d, cfg);
  CHECK(m.objective < 0.1);

  // independent scalar reference run
  double theta = 0.0;
  for (int t = 0; t < 1999; ++t) theta += 7e-2 * sigmoid(-theta);
  CHECK(m.theta[0] == doctest::Approx(theta).epsilon(1e-10));
}

TEST_CASE("rlr: lambda 0 equals lr") {
  Rng rng(21);
  const LabeledDataset d = random_labeled(rng, 30, 3);
  BaselineConfig cfg;
  cfg.iterations = 200;
  const BaselineModel lr = train_lr(d, cfg);
  const BaselineModel rlr = train_rlr(d, cfg);
  for (std::size_t c = 0; c < 3; ++c) CHECK(lr.theta[c] == doctest::Approx(rlr.theta[c]));
  CHECK(lr.objective == doctest::Approx(rlr.objective));
}

TEST_CASE("rlr: huge penalty pins theta near zero") {
  Rng rng(22);
  const LabeledDataset d = random_labeled(rng, 30, 3);
  BaselineConfig cfg;
  cfg.lambda_reg = 1e6;
  cfg.iterations = 1500;
  const BaselineModel m = train_rlr(d, cfg);
  CHECK(p_norm(m.theta, 2.0) <= 1e-3);
}

TEST_CASE("drlr: zero model objective is ln 2") {
  LabeledDataset d;
  d.x = {{1.0}};
  d.y = {1};
  BaselineConfig cfg;
  cfg.iterations = 1;
  cfg.r = 5.0;
  cfg.kappa = 1.0;
  const BaselineModel m = train_drlr(d, cfg);
  // initial scale is small; the objective at iteration 1 is ln 2 + r * scale
  CHECK(m.trace[0] == doctest::Approx(0.6931471805599453 + 5.0 * 1e-3));
}

TEST_CASE("drlr: iterates satisfy the cone constraint") {
  Rng rng(23);
  const LabeledDataset d = random_labeled(rng, 40, 2);
  BaselineConfig cfg;
  cfg.r = 0.3;
  cfg.kappa = 2.0;
  cfg.iterations = 800;
  const BaselineModel m = train_drlr(d, cfg);
  CHECK(p_norm(m.theta, 2.0) <= m.dual_scale + 1e-9);
}

TEST_CASE("drlr: r = 0 converges to the lr loss") {
  Rng rng(24);
  const LabeledDataset d = random_labeled(rng, 40, 2);
  BaselineConfig cfg;
  cfg.r = 0.0;
  cfg.kappa = 10.0;
  cfg.iterations = 4000;
  cfg.step_size = 5e-2;
  const BaselineModel robust = train_drlr(d, cfg);
  const BaselineModel plain = train_lr(d, cfg);
  const double lr_loss = plain.objective;
  // with r = 0 the scale grows freely, the cone and flip terms deactivate
  CHECK(std::fabs(robust.objective - lr_loss) < 1e-2);
}

TEST_CASE("norm cone projection") {
  Vec theta{3.0, 4.0};
  double s = 5.0;
  project_norm_cone(theta, s);
  CHECK(theta == Vec{3.0, 4.0});
  CHECK(s == 5.0);

  theta = {3.0, 4.0};
  s = 1.0;
  project_norm_cone(theta, s);
  CHECK(s == doctest::Approx(3.0));
  CHECK(p_norm(theta, 2.0) == doctest::Approx(3.0));

  theta = {1.0, 0.0};
  s = -2.0;
  project_norm_cone(theta, s);
  CHECK(s == 0.0);
  CHECK(theta == Vec{0.0, 0.0});
}

TEST_CASE("baseline objectives are convex along random segments") {
  Rng rng(25);
  const LabeledDataset d = random_labeled(rng, 15, 2);
  BaselineConfig cfg;
  cfg.lambda_reg = 0.3;
  cfg.r = 0.2;
  cfg.kappa = 1.5;
  const auto lr_obj = [&](const Vec& th) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      s += logistic_f(-d.y[i] * dot(th, d.x[i]));
    return s / static_cast<double>(d.size());
  };
  const auto rlr_obj = [&](const Vec& th) { return lr_obj(th) + cfg.lambda_reg * p_norm(th, 2.0); };
  const auto drlr_obj = [&](const Vec& th, double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      sum += robust_label_term(dot(th, d.x[i]), d.y[i], s * cfg.kappa);
    return cfg.r * s + sum / static_cast<double>(d.size());
  };
  for (int t = 0; t < 300; ++t) {
    Vec u{rng.normal(), rng.normal()}, v{rng.normal(), rng.normal()};
    const double su = std::fabs(rng.normal()) + p_norm(u, 2.0);
    const double sv = std::fabs(rng.normal()) + p_norm(v, 2.0);
    const double lam = rng.uniform01();
    Vec mid{lam * u[0] + (1 - lam) * v[0], lam * u[1] + (1 - lam) * v[1]};
    const double smid = lam * su + (1 - lam) * sv;
    CHECK(lr_obj(mid) <= lam * lr_obj(u) + (1 - lam) * lr_obj(v) + 1e-9);
    CHECK(rlr_obj(mid) <= lam * rlr_obj(u) + (1 - lam) * rlr_obj(v) + 1e-9);
    CHECK(drlr_obj(mid, smid) <= lam * drlr_obj(u, su) + (1 - lam) * drlr_obj(v, sv) + 1e-9);
  }
}
