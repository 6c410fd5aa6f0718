#include "datajoin/serialize.hpp"

#include <fstream>

namespace datajoin {

json to_json(const StandardizationStats& s) {
  return json{{"mean", s.mean}, {"scale", s.scale}, {"constant", s.constant}};
}

StandardizationStats stats_from_json(const json& j) {
  StandardizationStats s;
  if (j.is_null()) return s;
  s.mean = j.at("mean").get<Vec>();
  s.scale = j.at("scale").get<Vec>();
  if (j.contains("constant")) s.constant = j.at("constant").get<std::vector<std::uint8_t>>();
  return s;
}

json to_json(const MatchSet& m) {
  json pairs = json::array();
  for (const auto& p : m.pairs) pairs.push_back({{"i", p.i}, {"j", p.j}, {"dist", p.dist}});
  return json{{"k", m.k}, {"pairs", pairs}};
}

json to_json(const TransportPlan& p) {
  json entries = json::array();
  for (const auto& e : p.entries) entries.push_back({{"i", e.i}, {"j", e.j}, {"mass", e.mass}});
  return json{{"n_aux", p.n_aux}, {"n_lab", p.n_lab}, {"cost", p.cost}, {"entries", entries}};
}

json to_json(const FeasibilityCertificate& c) {
  return json{{"feasible", c.feasible},
              {"distance", c.distance},
              {"radius_sum", c.radius_sum},
              {"witness", to_json(c.witness)}};
}

json to_json(const SolverConfig& cfg) {
  return json{{"r_aux", cfg.r_aux},
              {"r_lab", cfg.r_lab},
              {"kappa_aux", cfg.kappa_aux},
              {"kappa_lab", cfg.kappa_lab},
              {"k", cfg.k},
              {"iterations", cfg.iterations},
              {"step_size", cfg.step_size},
              {"step_decay", cfg.step_decay},
              {"p", cfg.norm.p},
              {"p_aux", cfg.norm.p_aux},
              {"normalization",
               cfg.normalization == Normalization::match_size ? "match_size" : "pair_product"},
              {"iterate", cfg.iterate == IterateMode::averaged ? "averaged" : "last"},
              {"flip_cost_doubling", cfg.flip_cost_doubling},
              {"init_alpha", cfg.init_alpha},
              {"compute_certificate", cfg.compute_certificate}};
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig cfg;
  cfg.r_aux = j.value("r_aux", cfg.r_aux);
  cfg.r_lab = j.value("r_lab", cfg.r_lab);
  cfg.kappa_aux = j.value("kappa_aux", cfg.kappa_aux);
  cfg.kappa_lab = j.value("kappa_lab", cfg.kappa_lab);
  cfg.k = j.value("k", cfg.k);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.step_size = j.value("step_size", cfg.step_size);
  cfg.step_decay = j.value("step_decay", cfg.step_decay);
  cfg.norm.p = j.value("p", cfg.norm.p);
  cfg.norm.p_aux = j.value("p_aux", cfg.norm.p_aux);
  if (j.contains("normalization"))
    cfg.normalization = j.at("normalization").get<std::string>() == "match_size"
                            ? Normalization::match_size
                            : Normalization::pair_product;
  if (j.contains("iterate"))
    cfg.iterate = j.at("iterate").get<std::string>() == "averaged" ? IterateMode::averaged
                                                                   : IterateMode::last;
  cfg.flip_cost_doubling = j.value("flip_cost_doubling", cfg.flip_cost_doubling);
  cfg.init_alpha = j.value("init_alpha", cfg.init_alpha);
  cfg.compute_certificate = j.value("compute_certificate", cfg.compute_certificate);
  return cfg;
}

namespace {

json model_point_to_json(const ModelPoint& m) {
  return json{{"theta_x", m.theta_x},
              {"theta_a", m.theta_a},
              {"alpha_aux", m.alpha_aux},
              {"alpha_lab", m.alpha_lab},
              {"branch", branch_name(m.branch)}};
}

ModelPoint model_point_from_json(const json& j) {
  ModelPoint m;
  m.theta_x = j.at("theta_x").get<Vec>();
  m.theta_a = j.at("theta_a").get<Vec>();
  m.alpha_aux = j.at("alpha_aux").get<double>();
  m.alpha_lab = j.at("alpha_lab").get<double>();
  m.branch = j.at("branch").get<std::string>() == "lab_min" ? Branch::lab_min : Branch::aux_min;
  return m;
}

}  // namespace

json to_json(const TrainedModel& m, bool include_trace) {
  json j{{"version", 1},
         {"model", model_point_to_json(m.model)},
         {"objective", m.objective},
         {"config", to_json(m.config)},
         {"feasibility_warning", m.feasibility_warning},
         {"stats_x", to_json(m.stats_x)},
         {"stats_a", to_json(m.stats_a)}};
  if (m.certificate) j["certificate"] = to_json(*m.certificate);
  if (include_trace) {
    j["trace_aux_branch"] = m.trace_aux_branch;
    j["trace_lab_branch"] = m.trace_lab_branch;
  }
  return j;
}

TrainedModel trained_model_from_json(const json& j) {
  TrainedModel m;
  m.model = model_point_from_json(j.at("model"));
  m.objective = j.at("objective").get<double>();
  m.config = solver_config_from_json(j.at("config"));
  m.feasibility_warning = j.value("feasibility_warning", false);
  if (j.contains("stats_x")) m.stats_x = stats_from_json(j.at("stats_x"));
  if (j.contains("stats_a")) m.stats_a = stats_from_json(j.at("stats_a"));
  if (j.contains("trace_aux_branch")) m.trace_aux_branch = j.at("trace_aux_branch").get<Vec>();
  if (j.contains("trace_lab_branch")) m.trace_lab_branch = j.at("trace_lab_branch").get<Vec>();
  return m;
}

json to_json(const TrainedFairModel& m, bool include_trace) {
  json j{{"version", 1},
         {"model", model_point_to_json(m.point.base)},
         {"gamma0", m.point.gamma0},
         {"gamma1", m.point.gamma1},
         {"objective", m.objective},
         {"c_bar", m.c_bar_final},
         {"config", to_json(m.config)},
         {"fairness",
          {{"eta", m.fairness.eta}, {"p0", m.fairness.p0}, {"p1", m.fairness.p1}}},
         {"feasibility_warning", m.feasibility_warning}};
  if (m.certificate) j["certificate"] = to_json(*m.certificate);
  if (include_trace) {
    j["trace_aux_branch"] = m.trace_aux_branch;
    j["trace_lab_branch"] = m.trace_lab_branch;
  }
  return j;
}

json to_json(const BaselineConfig& cfg) {
  return json{{"lambda", cfg.lambda_reg},
              {"squared_penalty", cfg.squared_penalty},
              {"r", cfg.r},
              {"kappa", cfg.kappa},
              {"iterations", cfg.iterations},
              {"step_size", cfg.step_size}};
}

BaselineConfig baseline_config_from_json(const json& j) {
  BaselineConfig cfg;
  cfg.lambda_reg = j.value("lambda", cfg.lambda_reg);
  cfg.squared_penalty = j.value("squared_penalty", cfg.squared_penalty);
  cfg.r = j.value("r", cfg.r);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.step_size = j.value("step_size", cfg.step_size);
  return cfg;
}

json to_json(const Report& r) {
  json methods = json::object();
  for (const auto& m : r.methods) {
    json runs = json::array();
    for (const auto& run : m.runs) {
      json jr{{"seed", run.seed},
              {"accuracy", run.accuracy},
              {"objective", run.objective},
              {"seconds", run.seconds}};
      if (run.certificate) {
        jr["feasible"] = run.certificate->feasible;
        jr["wasserstein_distance"] = run.certificate->distance;
      }
      if (run.unfairness) jr["unfairness"] = *run.unfairness;
      if (!run.error.empty()) jr["error"] = run.error;
      runs.push_back(std::move(jr));
    }
    methods[m.name] = json{{"kind", method_kind_name(m.kind)},
                           {"mean_accuracy", m.mean_accuracy},
                           {"std_accuracy", m.std_accuracy},
                           {"runs", runs}};
  }
  return json{{"version", r.version},
              {"seed", r.seed},
              {"repetitions", r.repetitions},
              {"methods", methods}};
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec spec;
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.repetitions = j.value("repetitions", std::size_t{10});
  spec.output_path = j.value("output", std::string{});

  const json& src = j.at("source");
  const std::string type = src.at("type").get<std::string>();
  if (type == "synthetic") {
    spec.synthetic = true;
  } else if (type == "csv") {
    spec.synthetic = false;
    CsvSource csv;
    csv.path = src.at("path").get<std::string>();
    csv.schema.features = src.at("features").get<std::vector<std::string>>();
    if (src.contains("aux")) csv.schema.aux = src.at("aux").get<std::vector<std::string>>();
    if (src.contains("label")) csv.schema.label = src.at("label").get<std::string>();
    csv.schema.add_intercept = src.value("add_intercept", false);
    spec.csv = std::move(csv);
    const json& sp = j.at("split");
    spec.split.n_p = sp.at("n_p").get<std::size_t>();
    spec.split.overlap = sp.value("overlap", std::size_t{0});
    spec.split.test_fraction = sp.value("test_fraction", 0.3);
  } else {
    throw data_error("experiment spec: unknown source type '" + type + "'");
  }

  for (const json& jm : j.at("methods")) {
    MethodSpec m;
    m.kind = method_kind_from_string(jm.at("kind").get<std::string>());
    m.name = jm.value("name", method_kind_name(m.kind));
    if (m.kind == MethodKind::dj || m.kind == MethodKind::dj_fair)
      m.solver = solver_config_from_json(jm);
    else
      m.baseline = baseline_config_from_json(jm);
    if (m.kind == MethodKind::dj_fair) {
      FairnessConfig f;
      f.eta = jm.at("eta").get<double>();
      f.p0 = jm.at("p0").get<double>();
      f.p1 = jm.at("p1").get<double>();
      m.fairness = f;
    }
    spec.methods.push_back(std::move(m));
  }
  return spec;
}

json to_json(const ExperimentSpec& spec) {
  json j{{"seed", spec.seed}, {"repetitions", spec.repetitions}};
  if (!spec.output_path.empty()) j["output"] = spec.output_path;
  if (spec.synthetic) {
    j["source"] = {{"type", "synthetic"}};
  } else {
    json src{{"type", "csv"}, {"path", spec.csv->path}, {"features", spec.csv->schema.features}};
    if (!spec.csv->schema.aux.empty()) src["aux"] = spec.csv->schema.aux;
    if (spec.csv->schema.label) src["label"] = *spec.csv->schema.label;
    if (spec.csv->schema.add_intercept) src["add_intercept"] = true;
    j["source"] = std::move(src);
    j["split"] = {{"n_p", spec.split.n_p},
                  {"overlap", spec.split.overlap},
                  {"test_fraction", spec.split.test_fraction}};
  }
  json methods = json::array();
  for (const auto& m : spec.methods) {
    json jm;
    if (m.kind == MethodKind::dj || m.kind == MethodKind::dj_fair) {
      jm = to_json(m.solver);
      jm.erase("compute_certificate");
    } else {
      jm = to_json(m.baseline);
    }
    jm["kind"] = method_kind_name(m.kind);
    jm["name"] = m.name.empty() ? method_kind_name(m.kind) : m.name;
    if (m.fairness) {
      jm["eta"] = m.fairness->eta;
      jm["p0"] = m.fairness->p0;
      jm["p1"] = m.fairness->p1;
    }
    methods.push_back(std::move(jm));
  }
  j["methods"] = std::move(methods);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw data_error("json parse error in '" + path + "': " + e.what());
  }
}

}  // namespace datajoin
