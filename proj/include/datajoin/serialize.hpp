#pragma once

#include <string>

#include "json.hpp"

#include "datajoin/harness.hpp"

namespace datajoin {

using json = nlohmann::json;

json to_json(const StandardizationStats& s);
StandardizationStats stats_from_json(const json& j);

json to_json(const MatchSet& m);
json to_json(const TransportPlan& p);
json to_json(const FeasibilityCertificate& c);

json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const json& j);

json to_json(const TrainedModel& m, bool include_trace = true);
TrainedModel trained_model_from_json(const json& j);

json to_json(const TrainedFairModel& m, bool include_trace = true);

json to_json(const BaselineConfig& cfg);
BaselineConfig baseline_config_from_json(const json& j);

json to_json(const Report& r);

ExperimentSpec experiment_spec_from_json(const json& j);
json to_json(const ExperimentSpec& spec);

void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace datajoin
