#include "datajoin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace datajoin {

MethodKind method_kind_from_string(const std::string& s) {
  if (s == "dj") return MethodKind::dj;
  if (s == "dj_fair" || s == "dj-fair") return MethodKind::dj_fair;
  if (s == "lr") return MethodKind::lr;
  if (s == "rlr") return MethodKind::rlr;
  if (s == "drlr") return MethodKind::drlr;
  if (s == "lro") return MethodKind::lro;
  if (s == "rlro") return MethodKind::rlro;
  if (s == "full") return MethodKind::full;
  throw data_error("unknown method kind '" + s + "'");
}

std::string method_kind_name(MethodKind k) {
  switch (k) {
    case MethodKind::dj: return "dj";
    case MethodKind::dj_fair: return "dj_fair";
    case MethodKind::lr: return "lr";
    case MethodKind::rlr: return "rlr";
    case MethodKind::drlr: return "drlr";
    case MethodKind::lro: return "lro";
    case MethodKind::rlro: return "rlro";
    case MethodKind::full: return "full";
  }
  throw data_error("unknown method kind");
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw data_error("experiment: repetitions must be at least 1");
  if (methods.empty()) throw data_error("experiment: no methods listed");
  if (!synthetic && !csv) throw data_error("experiment: csv source missing");
  for (const auto& m : methods) {
    if (m.kind == MethodKind::dj || m.kind == MethodKind::dj_fair) m.solver.validate();
    if (m.kind == MethodKind::dj_fair && !m.fairness)
      throw data_error("experiment: dj_fair needs a fairness block");
    if (m.fairness) m.fairness->validate();
  }
}

const MethodReport& Report::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return m;
  throw data_error("report: no method named '" + name + "'");
}

double evaluate(const Vec& theta_x, const Vec& theta_a, const FullDataset& test) {
  test.validate();
  if (test.size() == 0) throw data_error("evaluate: empty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    double score = dot(theta_x, test.x[i]);
    if (!theta_a.empty()) score += dot(theta_a, test.a[i]);
    const int label = score >= 0.0 ? +1 : -1;
    if (label == test.y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace {

// One repetition's data, standardized. The group indicator used by the
// fairness method is kept raw: a binary column has no meaningful z-score and
// the fairness program requires values in {0, 1}.
struct RepetitionData {
  LabeledDataset labeled;
  AuxDataset aux;       // standardized a-block
  AuxDataset aux_raw_a; // x standardized, a raw
  FullDataset test;
  FullDataset test_raw_a;
  std::optional<FullDataset> overlap_rows;  // (x || a) models; csv sources only
  std::optional<FullDataset> train_rows;
  StandardizationStats stats_x, stats_a;
};

RepetitionData prepare_repetition(const ExperimentSpec& spec, std::uint64_t run_seed) {
  RepetitionData rep;
  if (spec.synthetic) {
    SyntheticData data = gen_synthetic(run_seed);
    rep.labeled = std::move(data.labeled);
    rep.aux = std::move(data.aux);
    rep.test = std::move(data.test);
  } else {
    const FullDataset full = load_full_csv(spec.csv->path, spec.csv->schema);
    SplitSpec split = spec.split;
    split.seed = run_seed;
    OverlapSplit s = split_overlap(full, split);
    rep.labeled = std::move(s.labeled);
    rep.aux = std::move(s.aux);
    rep.test = std::move(s.test);

    FullDataset overlap;
    for (std::size_t t = split.n_p; t < split.n_p + split.overlap; ++t) {
      const std::size_t r = s.train_rows[t];
      overlap.x.push_back(full.x[r]);
      overlap.a.push_back(full.a.empty() ? Vec{} : full.a[r]);
      overlap.y.push_back(full.y[r]);
    }
    if (overlap.size() > 0) rep.overlap_rows = std::move(overlap);

    FullDataset train;
    for (const std::size_t r : s.train_rows) {
      train.x.push_back(full.x[r]);
      train.a.push_back(full.a.empty() ? Vec{} : full.a[r]);
      train.y.push_back(full.y[r]);
    }
    rep.train_rows = std::move(train);
  }

  // Feature stats come from the union of the two training feature blocks so
  // the kNN matching and every model share one embedding.
  Matrix x_all = rep.labeled.x;
  x_all.insert(x_all.end(), rep.aux.x.begin(), rep.aux.x.end());
  rep.stats_x = fit_standardization(x_all);
  rep.labeled.x = rep.stats_x.apply(rep.labeled.x);
  rep.aux.x = rep.stats_x.apply(rep.aux.x);
  rep.test.x = rep.stats_x.apply(rep.test.x);

  rep.aux_raw_a = rep.aux;
  rep.test_raw_a = rep.test;
  if (rep.aux.dim_a() > 0) {
    rep.stats_a = fit_standardization(rep.aux.a);
    rep.aux.a = rep.stats_a.apply(rep.aux.a);
    if (rep.test.dim_a() > 0) rep.test.a = rep.stats_a.apply(rep.test.a);
  }
  if (rep.overlap_rows) {
    rep.overlap_rows->x = rep.stats_x.apply(rep.overlap_rows->x);
    if (rep.overlap_rows->dim_a() > 0) rep.overlap_rows->a = rep.stats_a.apply(rep.overlap_rows->a);
  }
  if (rep.train_rows) {
    rep.train_rows->x = rep.stats_x.apply(rep.train_rows->x);
    if (rep.train_rows->dim_a() > 0) rep.train_rows->a = rep.stats_a.apply(rep.train_rows->a);
  }
  return rep;
}

LabeledDataset concat_features(const FullDataset& rows) {
  LabeledDataset d;
  d.y = rows.y;
  d.x.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vec f = rows.x[i];
    if (!rows.a.empty()) f.insert(f.end(), rows.a[i].begin(), rows.a[i].end());
    d.x.push_back(std::move(f));
  }
  return d;
}

RunRecord run_method(const MethodSpec& method, const RepetitionData& rep, std::uint64_t run_seed) {
  RunRecord rec;
  rec.seed = run_seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (method.kind) {
      case MethodKind::dj: {
        const TrainedModel m = train(rep.aux, rep.labeled, method.solver);
        rec.accuracy = evaluate(m.model.theta_x, m.model.theta_a, rep.test);
        rec.objective = m.objective;
        rec.certificate = m.certificate;
        break;
      }
      case MethodKind::dj_fair: {
        const TrainedFairModel m = train_fair(rep.aux_raw_a, rep.labeled, method.solver,
                                              *method.fairness);
        rec.accuracy = evaluate(m.point.base.theta_x, m.point.base.theta_a, rep.test_raw_a);
        rec.objective = m.objective;
        rec.certificate = m.certificate;
        std::vector<int> group(rep.test_raw_a.size());
        for (std::size_t i = 0; i < group.size(); ++i)
          group[i] = static_cast<int>(rep.test_raw_a.a[i][0]);
        rec.unfairness = unfairness_empirical(m.point.base.theta_x, rep.test_raw_a.x, group,
                                              rep.test_raw_a.y);
        break;
      }
      case MethodKind::lr:
      case MethodKind::rlr:
      case MethodKind::drlr: {
        BaselineConfig cfg = method.baseline;
        cfg.kind = method.kind == MethodKind::lr    ? BaselineKind::lr
                   : method.kind == MethodKind::rlr ? BaselineKind::rlr
                                                    : BaselineKind::drlr;
        const BaselineModel m = train_baseline(rep.labeled, cfg);
        rec.accuracy = evaluate(m.theta, {}, rep.test);
        rec.objective = m.objective;
        break;
      }
      case MethodKind::lro:
      case MethodKind::rlro:
      case MethodKind::full: {
        const FullDataset* rows = nullptr;
        if (method.kind == MethodKind::full) {
          if (!rep.train_rows) throw data_error("full: source has no complete training rows");
          rows = &*rep.train_rows;
        } else {
          if (!rep.overlap_rows) throw data_error("overlap methods need a csv source with v > 0");
          rows = &*rep.overlap_rows;
        }
        BaselineConfig cfg = method.baseline;
        cfg.kind = method.kind == MethodKind::rlro ? BaselineKind::rlr : BaselineKind::lr;
        const LabeledDataset joined = concat_features(*rows);
        const BaselineModel m = train_baseline(joined, cfg);
        const std::size_t m1 = rep.test.dim_x();
        const Vec theta_x(m.theta.begin(), m.theta.begin() + static_cast<std::ptrdiff_t>(m1));
        const Vec theta_a(m.theta.begin() + static_cast<std::ptrdiff_t>(m1), m.theta.end());
        rec.accuracy = evaluate(theta_x, theta_a, rep.test);
        rec.objective = m.objective;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

Report run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  Report report;
  report.seed = spec.seed;
  report.repetitions = spec.repetitions;
  for (const auto& m : spec.methods) {
    MethodReport mr;
    mr.name = m.name.empty() ? method_kind_name(m.kind) : m.name;
    mr.kind = m.kind;
    report.methods.push_back(std::move(mr));
  }

  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    const std::uint64_t run_seed = spec.seed + r;  // documented seed ladder
    RepetitionData rep = prepare_repetition(spec, run_seed);
    for (std::size_t m = 0; m < spec.methods.size(); ++m)
      report.methods[m].runs.push_back(run_method(spec.methods[m], rep, run_seed));
  }

  for (auto& m : report.methods) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& run : m.runs)
      if (run.ok()) {
        sum += run.accuracy;
        ++n;
      }
    if (n == 0) continue;
    m.mean_accuracy = sum / static_cast<double>(n);
    double var = 0.0;
    for (const auto& run : m.runs)
      if (run.ok()) var += sqr(run.accuracy - m.mean_accuracy);
    m.std_accuracy = std::sqrt(var / static_cast<double>(n));
  }
  return report;
}

ExperimentSpec synthetic_shift_spec(std::uint64_t seed, std::size_t repetitions) {
  ExperimentSpec spec;
  spec.synthetic = true;
  spec.seed = seed;
  spec.repetitions = repetitions;

  MethodSpec lr;
  lr.kind = MethodKind::lr;
  lr.name = "lr";
  spec.methods.push_back(lr);

  MethodSpec rlr;
  rlr.kind = MethodKind::rlr;
  rlr.name = "rlr";
  rlr.baseline.lambda_reg = 10.0;
  spec.methods.push_back(rlr);

  MethodSpec drlr;
  drlr.kind = MethodKind::drlr;
  drlr.name = "drlr";
  drlr.baseline.r = 100.0;
  drlr.baseline.kappa = 10.0;
  spec.methods.push_back(drlr);

  MethodSpec dj;
  dj.kind = MethodKind::dj;
  dj.name = "dj";
  dj.solver.r_aux = 0.65;
  dj.solver.r_lab = 0.65;
  dj.solver.kappa_aux = 5.0;
  dj.solver.kappa_lab = 5.0;
  dj.solver.k = 1;
  dj.solver.iterations = 1500;
  dj.solver.step_size = 7e-2;
  dj.solver.normalization = Normalization::match_size;
  spec.methods.push_back(dj);

  return spec;
}

}  // namespace datajoin
