#include <cmath>

#include "doctest.h"

#include "datajoin/rng.hpp"
#include "datajoin/solver.hpp"

using namespace datajoin;

namespace {

// Small two-cluster instance: feature carries the label, auxiliary block
// reinforces it.
void small_instance(Rng& rng, std::size_t n_a, std::size_t n_p, AuxDataset& aux,
                    LabeledDataset& lab) {
  aux = {};
  lab = {};
  for (std::size_t i = 0; i < n_a; ++i) {
    const double s = i % 2 == 0 ? 1.0 : -1.0;
    aux.x.push_back({s + 0.3 * rng.normal(), 0.3 * rng.normal()});
    aux.a.push_back({s + 0.3 * rng.normal()});
  }
  for (std::size_t j = 0; j < n_p; ++j) {
    const double s = j % 2 == 0 ? 1.0 : -1.0;
    lab.x.push_back({s + 0.3 * rng.normal(), 0.3 * rng.normal()});
    lab.y.push_back(s > 0 ? 1 : -1);
  }
}

SolverConfig small_config() {
  SolverConfig cfg;
  cfg.r_aux = 0.05;
  cfg.r_lab = 0.05;
  cfg.kappa_aux = 2.0;
  cfg.kappa_lab = 2.0;
  cfg.k = 1;
  cfg.iterations = 400;
  cfg.step_size = 0.05;
  cfg.normalization = Normalization::match_size;
  cfg.compute_certificate = false;
  return cfg;
}

}  // namespace

TEST_CASE("train: objective improves over the zero model on separable data") {
  AuxDataset aux;
  aux.x = {{0.0}};
  aux.a = {{0.0}};
  LabeledDataset lab;
  lab.x = {{0.0}};
  lab.y = {1};
  SolverConfig cfg;
  cfg.r_aux = 1.0;
  cfg.r_lab = 1.0;
  cfg.iterations = 500;
  cfg.step_size = 0.05;
  cfg.compute_certificate = true;
  const TrainedModel m = train(aux, lab, cfg);
  // theta = 0 with alphas at the initializer scores ln 2 plus the alpha terms
  CHECK(m.objective < 0.6931471805599453 + 2.0 * cfg.init_alpha);
  CHECK(m.certificate.has_value());
  CHECK(m.certificate->feasible);
  CHECK_FALSE(m.feasibility_warning);
}

TEST_CASE("train: every iterate of both chains is feasible") {
  Rng rng(12);
  AuxDataset aux;
  LabeledDataset lab;
  small_instance(rng, 16, 12, aux, lab);
  SolverConfig cfg = small_config();
  const TrainedModel m = train(aux, lab, cfg);
  CHECK(m.min_iterate_slack >= -1e-9);
  CHECK(model_feasible(m.model, cfg));
  CHECK(m.trace_aux_branch.size() == cfg.iterations);
  CHECK(m.trace_lab_branch.size() == cfg.iterations);
}

TEST_CASE("train: returned objective is the better branch, recomputable") {
  Rng rng(13);
  AuxDataset aux;
  LabeledDataset lab;
  small_instance(rng, 14, 10, aux, lab);
  const SolverConfig cfg = small_config();
  const TrainedModel m = train(aux, lab, cfg);
  const MatchSet match = build_match_set(aux, lab, cfg.k, cfg.norm);
  const double recomputed = omega(m.model, match, aux, lab, cfg);
  CHECK(recomputed == doctest::Approx(m.objective).epsilon(1e-9));
  // the winner's final trace value cannot exceed the loser's
  const double last_aux = m.trace_aux_branch.back();
  const double last_lab = m.trace_lab_branch.back();
  CHECK(m.objective == doctest::Approx(std::min(last_aux, last_lab)).epsilon(1e-12));
}

TEST_CASE("train: deterministic") {
  Rng rng(14);
  AuxDataset aux;
  LabeledDataset lab;
  small_instance(rng, 10, 8, aux, lab);
  const SolverConfig cfg = small_config();
  const TrainedModel a = train(aux, lab, cfg);
  const TrainedModel b = train(aux, lab, cfg);
  CHECK(a.model.theta_x == b.model.theta_x);
  CHECK(a.model.alpha_aux == b.model.alpha_aux);
  CHECK(a.trace_aux_branch == b.trace_aux_branch);
}

TEST_CASE("train: infeasible radii attach a warning but training proceeds") {
  AuxDataset aux;
  aux.x = {{0.0}};
  aux.a = {{0.0}};
  LabeledDataset lab;
  lab.x = {{4.0}};
  lab.y = {1};
  SolverConfig cfg;
  cfg.r_aux = 1.0;
  cfg.r_lab = 1.0;
  cfg.iterations = 10;
  const TrainedModel m = train(aux, lab, cfg);
  CHECK(m.feasibility_warning);
  CHECK(m.certificate->distance == doctest::Approx(4.0));
}

TEST_CASE("train: suffix-averaged objective non-increasing in the budget") {
  Rng rng(15);
  AuxDataset aux;
  LabeledDataset lab;
  small_instance(rng, 12, 10, aux, lab);
  SolverConfig cfg = small_config();
  cfg.step_decay = true;
  Vec suffix_means;
  for (const std::size_t budget : {250u, 1000u, 4000u}) {
    cfg.iterations = budget;
    const TrainedModel m = train(aux, lab, cfg);
    const Vec& trace =
        m.model.branch == Branch::aux_min ? m.trace_aux_branch : m.trace_lab_branch;
    const std::size_t tail = budget / 10;
    double mean = 0.0;
    for (std::size_t t = trace.size() - tail; t < trace.size(); ++t) mean += trace[t];
    suffix_means.push_back(mean / static_cast<double>(tail));
  }
  CHECK(suffix_means[1] <= suffix_means[0] + 1e-9);
  CHECK(suffix_means[2] <= suffix_means[1] + 1e-9);
}

TEST_CASE("predict: tie convention and sign symmetry") {
  ModelPoint m;
  m.theta_x = {0.0, 0.0};
  m.theta_a = {};
  CHECK(predict(m, Vec{1.0, 2.0}, {}).label == 1);
  CHECK(predict(m, Vec{1.0, 2.0}, {}).score == 0.0);

  m.theta_x = {1.0, 0.0};
  const Prediction p = predict(m, Vec{2.0, -5.0}, {});
  CHECK(p.score == doctest::Approx(2.0));
  CHECK(p.label == 1);

  ModelPoint neg = m;
  for (auto& v : neg.theta_x) v = -v;
  const Prediction q = predict(neg, Vec{2.0, -5.0}, {});
  CHECK(q.score == doctest::Approx(-2.0));
  CHECK(q.label == -1);
}

TEST_CASE("predict: dimension checks") {
  ModelPoint m;
  m.theta_x = {1.0};
  m.theta_a = {1.0};
  CHECK_THROWS_AS(predict(m, Vec{1.0, 2.0}, Vec{0.0}), data_error);
  CHECK_THROWS_AS(predict(m, Vec{1.0}, Vec{}), data_error);
  CHECK(predict(m, Vec{1.0}, Vec{2.0}).score == doctest::Approx(3.0));
}
