#ifndef SLICERISK_JSON_IO_HPP
#define SLICERISK_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "slicerisk/bench.hpp"
#include "slicerisk/estimator.hpp"
#include "slicerisk/mixture.hpp"
#include "slicerisk/scenario.hpp"

namespace slicerisk {

// {"truncation": 0.0, "components": [{"weight": w, "mean": m, "std": s}, ...]}
nlohmann::json mixture_to_json(const TruncatedMixture& mixture);
TruncatedMixture mixture_from_json(const nlohmann::json& j);

// {"lambda": ..., "eta": ..., "n_max": ..., "r_max": ..., "slice_load": <mixture>}
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
ScenarioSpec load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ScenarioSpec& spec);

nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

// Every field optional; absent fields keep their defaults.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& config);

BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::string& path);
nlohmann::json bench_config_to_json(const BenchConfig& config);

nlohmann::json summary_to_json(const BenchSummary& summary);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace slicerisk

#endif
