// Command-line front end: kNN matching, feasibility certificates, training,
// prediction and the experiment harness, all reading/writing JSON and CSV.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "datajoin/serialize.hpp"

namespace dj = datajoin;

namespace {

struct CsvArgs {
  std::string path;
  std::vector<std::string> features;
  std::vector<std::string> aux;
  std::string label = "y";
};

void add_csv_options(CLI::App* cmd, CsvArgs& args, bool with_aux, bool with_label) {
  cmd->add_option("--csv", args.path, "input csv file")->required();
  cmd->add_option("--features", args.features, "feature column names")->required()->delimiter(',');
  if (with_aux) cmd->add_option("--aux", args.aux, "auxiliary column names")->delimiter(',');
  if (with_label) cmd->add_option("--label", args.label, "label column name");
}

dj::CsvSchema schema_of(const CsvArgs& args, bool with_label) {
  dj::CsvSchema s;
  s.features = args.features;
  s.aux = args.aux;
  if (with_label) s.label = args.label;
  return s;
}

void emit(const dj::json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << std::endl;
  else
    dj::write_json_file(out_path, j);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const dj::Matrix& rows) {
  std::ofstream out(path);
  if (!out) throw dj::data_error("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

struct SolverFlags {
  bool averaged = false;
  bool by_matches = false;
};

void add_solver_options(CLI::App* cmd, dj::SolverConfig& cfg, SolverFlags& flags) {
  cmd->add_option("--r-aux", cfg.r_aux, "aux-side radius");
  cmd->add_option("--r-lab", cfg.r_lab, "labeled-side radius");
  cmd->add_option("--kappa-aux", cfg.kappa_aux, "auxiliary metric weight");
  cmd->add_option("--kappa-lab", cfg.kappa_lab, "label metric weight");
  cmd->add_option("--k", cfg.k, "neighbor count");
  cmd->add_option("--iterations", cfg.iterations, "descent steps");
  cmd->add_option("--step-size", cfg.step_size, "descent step size");
  cmd->add_flag("--step-decay", cfg.step_decay, "decay the step as 1/sqrt(t)");
  cmd->add_option("--p", cfg.norm.p, "feature norm exponent");
  cmd->add_option("--p-aux", cfg.norm.p_aux, "auxiliary norm exponent");
  cmd->add_flag("--averaged", flags.averaged, "use averaged iterates");
  cmd->add_flag("--normalize-by-matches", flags.by_matches,
                "divide the pair sum by |M| instead of n_aux * n_lab");
  cmd->add_flag("--flip-cost-doubling", cfg.flip_cost_doubling,
                "price label flips at 2 kappa_lab alpha_lab");
}

void apply_solver_flags(dj::SolverConfig& cfg, const SolverFlags& flags) {
  if (flags.averaged) cfg.iterate = dj::IterateMode::averaged;
  if (flags.by_matches) cfg.normalization = dj::Normalization::match_size;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributionally robust data join"};
  app.require_subcommand(1);

  // ---- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "write the synthetic benchmark as csv files");
  std::uint64_t synth_seed = 0;
  std::string synth_dir = ".";
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out-dir", synth_dir, "output directory");

  // ---- match ----------------------------------------------------------
  auto* match_cmd = app.add_subcommand("match", "emit the kNN match set as json");
  CsvArgs match_aux, match_lab;
  std::size_t match_k = 1;
  double match_p = 2.0;
  std::string match_out;
  auto* match_aux_grp = match_cmd->add_option_group("aux");
  match_aux_grp->add_option("--aux-csv", match_aux.path, "auxiliary dataset csv")->required();
  match_cmd->add_option("--labeled-csv", match_lab.path, "labeled dataset csv")->required();
  match_cmd->add_option("--features", match_aux.features, "feature columns")->required()->delimiter(',');
  match_cmd->add_option("--label", match_lab.label, "label column");
  match_cmd->add_option("--k", match_k, "neighbor count");
  match_cmd->add_option("--p", match_p, "feature norm exponent");
  match_cmd->add_option("--out", match_out, "output path (stdout when absent)");

  // ---- feasibility ----------------------------------------------------
  auto* feas = app.add_subcommand("feasibility", "ambiguity-set feasibility certificate");
  CsvArgs feas_aux, feas_lab;
  double feas_r_aux = 0.0, feas_r_lab = 0.0, feas_p = 2.0;
  std::string feas_out;
  feas->add_option("--aux-csv", feas_aux.path)->required();
  feas->add_option("--labeled-csv", feas_lab.path)->required();
  feas->add_option("--features", feas_aux.features)->required()->delimiter(',');
  feas->add_option("--label", feas_lab.label, "label column");
  feas->add_option("--r-aux", feas_r_aux)->required();
  feas->add_option("--r-lab", feas_r_lab)->required();
  feas->add_option("--p", feas_p, "feature norm exponent");
  feas->add_option("--out", feas_out);

  // ---- train ----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "fit the data-join model");
  CsvArgs train_aux, train_lab;
  std::string train_out;
  train_cmd->add_option("--aux-csv", train_aux.path)->required();
  train_cmd->add_option("--labeled-csv", train_lab.path)->required();
  train_cmd->add_option("--features", train_aux.features)->required()->delimiter(',');
  train_cmd->add_option("--aux", train_aux.aux, "auxiliary columns")->delimiter(',');
  train_cmd->add_option("--label", train_lab.label);
  train_cmd->add_option("--out", train_out, "model output path");
  bool train_standardize = false;
  train_cmd->add_flag("--standardize", train_standardize, "standardize features before training");
  dj::SolverConfig train_cfg;
  SolverFlags train_flags;
  add_solver_options(train_cmd, train_cfg, train_flags);

  // ---- train-fair -----------------------------------------------------
  auto* fair_cmd = app.add_subcommand("train-fair", "fit the fairness-regularized model");
  CsvArgs fair_aux, fair_lab;
  std::string fair_out;
  double fair_eta = 0.0, fair_p0 = 0.25, fair_p1 = 0.25;
  fair_cmd->add_option("--aux-csv", fair_aux.path)->required();
  fair_cmd->add_option("--labeled-csv", fair_lab.path)->required();
  fair_cmd->add_option("--features", fair_aux.features)->required()->delimiter(',');
  fair_cmd->add_option("--group", fair_aux.aux, "binary group column")->required()->delimiter(',');
  fair_cmd->add_option("--label", fair_lab.label);
  fair_cmd->add_option("--eta", fair_eta, "fairness penalty weight")->required();
  fair_cmd->add_option("--p0", fair_p0, "positive rate of group 0")->required();
  fair_cmd->add_option("--p1", fair_p1, "positive rate of group 1")->required();
  fair_cmd->add_option("--out", fair_out);
  dj::SolverConfig fair_cfg;
  SolverFlags fair_flags;
  add_solver_options(fair_cmd, fair_cfg, fair_flags);

  // ---- baseline -------------------------------------------------------
  auto* base_cmd = app.add_subcommand("baseline", "fit lr / rlr / drlr on the labeled data");
  CsvArgs base_lab;
  std::string base_kind = "lr", base_out;
  dj::BaselineConfig base_cfg;
  add_csv_options(base_cmd, base_lab, false, true);
  base_cmd->add_option("--kind", base_kind, "lr | rlr | drlr")->required();
  base_cmd->add_option("--lambda", base_cfg.lambda_reg, "rlr penalty");
  base_cmd->add_flag("--squared-penalty", base_cfg.squared_penalty, "penalize ||theta||^2");
  base_cmd->add_option("--r", base_cfg.r, "drlr radius");
  base_cmd->add_option("--kappa", base_cfg.kappa, "drlr flip weight");
  base_cmd->add_option("--iterations", base_cfg.iterations);
  base_cmd->add_option("--step-size", base_cfg.step_size);
  base_cmd->add_option("--out", base_out);

  // ---- predict --------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "score rows with a trained model");
  std::string pred_model, pred_out;
  CsvArgs pred_csv;
  pred_cmd->add_option("--model", pred_model, "model json")->required();
  add_csv_options(pred_cmd, pred_csv, true, false);
  pred_cmd->add_option("--out", pred_out);

  // ---- evaluate -------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "accuracy of a trained model on labeled rows");
  std::string eval_model;
  CsvArgs eval_csv;
  eval_cmd->add_option("--model", eval_model, "model json")->required();
  add_csv_options(eval_cmd, eval_csv, true, true);

  // ---- experiment -----------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "run a repeated-split experiment spec");
  std::string exp_spec_path, exp_out;
  bool exp_builtin_synth = false;
  std::uint64_t exp_seed = 0;
  exp_cmd->add_option("--spec", exp_spec_path, "experiment spec json");
  exp_cmd->add_flag("--synthetic-shift", exp_builtin_synth,
                    "run the built-in synthetic shift benchmark");
  exp_cmd->add_option("--seed", exp_seed, "seed override for --synthetic-shift");
  exp_cmd->add_option("--out", exp_out, "report output path (overrides spec)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit with 1
  }

  try {
    if (*synth) {
      const dj::SyntheticData data = dj::gen_synthetic(synth_seed);
      std::vector<std::string> xh{"x1", "x2"};
      std::vector<std::string> ah;
      for (int i = 1; i <= 8; ++i) ah.push_back("a" + std::to_string(i));

      dj::Matrix sp(data.labeled.size());
      for (std::size_t i = 0; i < sp.size(); ++i) {
        sp[i] = data.labeled.x[i];
        sp[i].push_back(data.labeled.y[i]);
      }
      std::vector<std::string> sp_h = xh;
      sp_h.push_back("y");
      write_csv(synth_dir + "/labeled.csv", sp_h, sp);

      dj::Matrix sa(data.aux.size());
      std::vector<std::string> sa_h = xh;
      sa_h.insert(sa_h.end(), ah.begin(), ah.end());
      for (std::size_t i = 0; i < sa.size(); ++i) {
        sa[i] = data.aux.x[i];
        sa[i].insert(sa[i].end(), data.aux.a[i].begin(), data.aux.a[i].end());
      }
      write_csv(synth_dir + "/aux.csv", sa_h, sa);

      dj::Matrix st(data.test.size());
      std::vector<std::string> st_h = sa_h;
      st_h.push_back("y");
      for (std::size_t i = 0; i < st.size(); ++i) {
        st[i] = data.test.x[i];
        st[i].insert(st[i].end(), data.test.a[i].begin(), data.test.a[i].end());
        st[i].push_back(data.test.y[i]);
      }
      write_csv(synth_dir + "/test.csv", st_h, st);
      std::printf("wrote labeled.csv (%zu rows), aux.csv (%zu), test.csv (%zu) to %s\n",
                  data.labeled.size(), data.aux.size(), data.test.size(), synth_dir.c_str());
      return 0;
    }

    if (*match_cmd) {
      dj::CsvSchema fs;
      fs.features = match_aux.features;
      const dj::AuxDataset aux = dj::load_aux_csv(match_aux.path, fs);
      fs.label = match_lab.label;
      const dj::LabeledDataset lab = dj::load_labeled_csv(match_lab.path, fs);
      dj::NormSpec norm;
      norm.p = match_p;
      emit(dj::to_json(dj::build_match_set(aux, lab, match_k, norm)), match_out);
      return 0;
    }

    if (*feas) {
      dj::CsvSchema fs;
      fs.features = feas_aux.features;
      const dj::AuxDataset aux = dj::load_aux_csv(feas_aux.path, fs);
      fs.label = feas_lab.label;
      const dj::LabeledDataset lab = dj::load_labeled_csv(feas_lab.path, fs);
      dj::NormSpec norm;
      norm.p = feas_p;
      const auto cert = dj::check_feasibility(aux, lab, feas_r_aux, feas_r_lab, norm);
      emit(dj::to_json(cert), feas_out);
      return cert.feasible ? 0 : 0;
    }

    if (*train_cmd) {
      apply_solver_flags(train_cfg, train_flags);
      dj::CsvSchema fs = schema_of(train_aux, false);
      dj::AuxDataset aux = dj::load_aux_csv(train_aux.path, fs);
      fs.aux.clear();
      fs.label = train_lab.label;
      dj::LabeledDataset lab = dj::load_labeled_csv(train_lab.path, fs);

      dj::StandardizationStats stats_x, stats_a;
      if (train_standardize) {
        dj::Matrix x_all = lab.x;
        x_all.insert(x_all.end(), aux.x.begin(), aux.x.end());
        stats_x = dj::fit_standardization(x_all);
        lab.x = stats_x.apply(lab.x);
        aux.x = stats_x.apply(aux.x);
        if (aux.dim_a() > 0) {
          stats_a = dj::fit_standardization(aux.a);
          aux.a = stats_a.apply(aux.a);
        }
      }
      dj::TrainedModel model = dj::train(aux, lab, train_cfg);
      model.stats_x = stats_x;
      model.stats_a = stats_a;
      if (model.feasibility_warning)
        std::fprintf(stderr,
                     "warning: wasserstein distance %.17g exceeds r_aux + r_lab = %.17g; "
                     "the ambiguity set is empty and the surrogate value is a study quantity\n",
                     model.certificate->distance, model.certificate->radius_sum);
      emit(dj::to_json(model), train_out);
      return 0;
    }

    if (*fair_cmd) {
      apply_solver_flags(fair_cfg, fair_flags);
      dj::CsvSchema fs = schema_of(fair_aux, false);
      const dj::AuxDataset aux = dj::load_aux_csv(fair_aux.path, fs);
      fs.aux.clear();
      fs.label = fair_lab.label;
      const dj::LabeledDataset lab = dj::load_labeled_csv(fair_lab.path, fs);
      dj::FairnessConfig fair;
      fair.eta = fair_eta;
      fair.p0 = fair_p0;
      fair.p1 = fair_p1;
      emit(dj::to_json(dj::train_fair(aux, lab, fair_cfg, fair)), fair_out);
      return 0;
    }

    if (*base_cmd) {
      base_cfg.kind = base_kind == "lr"    ? dj::BaselineKind::lr
                      : base_kind == "rlr" ? dj::BaselineKind::rlr
                      : base_kind == "drlr"
                          ? dj::BaselineKind::drlr
                          : throw dj::data_error("baseline kind must be lr, rlr or drlr");
      const dj::LabeledDataset lab = dj::load_labeled_csv(base_lab.path, schema_of(base_lab, true));
      const dj::BaselineModel m = dj::train_baseline(lab, base_cfg);
      dj::json j{{"version", 1},
                 {"kind", base_kind},
                 {"theta", m.theta},
                 {"dual_scale", m.dual_scale},
                 {"objective", m.objective},
                 {"config", dj::to_json(base_cfg)}};
      emit(j, base_out);
      return 0;
    }

    if (*pred_cmd) {
      const dj::TrainedModel model = dj::trained_model_from_json(dj::read_json_file(pred_model));
      dj::CsvSchema fs = schema_of(pred_csv, false);
      dj::AuxDataset rows = dj::load_aux_csv(pred_csv.path, fs);
      if (!model.stats_x.mean.empty()) rows.x = model.stats_x.apply(rows.x);
      if (!model.stats_a.mean.empty() && rows.dim_a() > 0) rows.a = model.stats_a.apply(rows.a);
      dj::json out = dj::json::array();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const dj::Prediction p =
            dj::predict(model.model, rows.x[i], rows.dim_a() > 0 ? rows.a[i] : dj::Vec{});
        out.push_back({{"row", i}, {"score", p.score}, {"label", p.label}});
      }
      emit(out, pred_out);
      return 0;
    }

    if (*eval_cmd) {
      const dj::TrainedModel model = dj::trained_model_from_json(dj::read_json_file(eval_model));
      dj::CsvSchema fs = schema_of(eval_csv, true);
      dj::FullDataset rows = dj::load_full_csv(eval_csv.path, fs);
      if (!model.stats_x.mean.empty()) rows.x = model.stats_x.apply(rows.x);
      if (!model.stats_a.mean.empty() && rows.dim_a() > 0) rows.a = model.stats_a.apply(rows.a);
      const double acc = dj::evaluate(model.model.theta_x, model.model.theta_a, rows);
      std::printf("%.17g\n", acc);
      return 0;
    }

    if (*exp_cmd) {
      dj::ExperimentSpec spec;
      if (exp_builtin_synth)
        spec = dj::synthetic_shift_spec(exp_seed);
      else if (!exp_spec_path.empty())
        spec = dj::experiment_spec_from_json(dj::read_json_file(exp_spec_path));
      else
        throw dj::data_error("experiment: pass --spec or --synthetic-shift");
      const dj::Report report = dj::run_experiment(spec);
      dj::json j = dj::to_json(report);
      j["spec"] = dj::to_json(spec);
      const std::string out = !exp_out.empty() ? exp_out : spec.output_path;
      emit(j, out);
      if (out.empty()) return 0;
      for (const auto& m : report.methods)
        std::printf("%-8s mean accuracy %.17g  std %.17g\n", m.name.c_str(), m.mean_accuracy,
                    m.std_accuracy);
      return 0;
    }
  } catch (const dj::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const dj::numeric_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
