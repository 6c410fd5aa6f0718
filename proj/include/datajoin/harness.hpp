#pragma once

#include <map>
#include <optional>
#include <string>

#include "datajoin/baselines.hpp"
#include "datajoin/dataset.hpp"
#include "datajoin/fairness.hpp"
#include "datajoin/solver.hpp"

namespace datajoin {

enum class MethodKind { dj, dj_fair, lr, rlr, drlr, lro, rlro, full };

MethodKind method_kind_from_string(const std::string& s);
std::string method_kind_name(MethodKind k);

struct MethodSpec {
  MethodKind kind = MethodKind::dj;
  std::string name;                      // defaults to the kind name
  SolverConfig solver;                   // dj / dj_fair
  std::optional<FairnessConfig> fairness;  // dj_fair
  BaselineConfig baseline;               // lr / rlr / drlr / lro / rlro / full
};

struct CsvSource {
  std::string path;
  CsvSchema schema;
};

struct ExperimentSpec {
  bool synthetic = true;
  std::optional<CsvSource> csv;
  SplitSpec split;  // csv sources only
  std::vector<MethodSpec> methods;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::string output_path;

  void validate() const;
};

struct RunRecord {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
  std::optional<FeasibilityCertificate> certificate;
  std::optional<double> unfairness;  // dj_fair only
  std::string error;                 // nonempty when the method failed on this run

  bool ok() const { return error.empty(); }
};

struct MethodReport {
  std::string name;
  MethodKind kind = MethodKind::dj;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population standard deviation over successful runs
  std::vector<RunRecord> runs;
};

struct Report {
  int version = 1;
  std::uint64_t seed = 0;
  std::size_t repetitions = 0;
  std::vector<MethodReport> methods;

  const MethodReport& method(const std::string& name) const;
};

// Fraction of correct sign predictions on the test rows. Methods that do not
// consume auxiliary features pass an empty theta_a.
double evaluate(const Vec& theta_x, const Vec& theta_a, const FullDataset& test);

// One repetition per derived seed (base + r): generate or split, fit the
// standardization on the training features, train every method, evaluate on
// the held-out rows. A method failure is recorded in its run row and does
// not abort the other methods.
Report run_experiment(const ExperimentSpec& spec);

// The canned distribution-shift benchmark configuration (synthetic source
// with the LR / RLR / DRLR / DJ method set).
ExperimentSpec synthetic_shift_spec(std::uint64_t seed, std::size_t repetitions = 10);

}  // namespace datajoin
