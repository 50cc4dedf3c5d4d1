#include "slicerisk/json_io.hpp"

#include <fstream>

#include "slicerisk/errors.hpp"
#include "slicerisk/io.hpp"

namespace slicerisk {

namespace {
using nlohmann::json;

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ValidationError("JSON field '" + key + "' missing or not a number");
    return j[key].get<double>();
}

int require_int(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ValidationError("JSON field '" + key + "' missing or not an integer");
    return j[key].get<int>();
}
} // namespace

json mixture_to_json(const TruncatedMixture& mixture) {
    json comps = json::array();
    for (const auto& c : mixture.components())
        comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"std", c.stddev}});
    return {{"truncation", mixture.truncation()}, {"components", std::move(comps)}};
}

TruncatedMixture mixture_from_json(const json& j) {
    if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
        throw ValidationError("mixture JSON needs a 'components' array");
    const double truncation = j.contains("truncation") ? require_number(j, "truncation") : 0.0;
    std::vector<GaussianComponent> comps;
    comps.reserve(j["components"].size());
    for (const auto& cj : j["components"]) {
        comps.push_back({require_number(cj, "weight"), require_number(cj, "mean"),
                         require_number(cj, "std")});
    }
    return TruncatedMixture(std::move(comps), truncation);
}

json scenario_to_json(const ScenarioSpec& spec) {
    return {{"lambda", spec.rates.lambda},
            {"eta", spec.rates.eta},
            {"n_max", spec.rates.n_max},
            {"r_max", spec.r_max},
            {"slice_load", mixture_to_json(spec.slice_load)}};
}

ScenarioSpec scenario_from_json(const json& j) {
    if (!j.contains("slice_load"))
        throw ValidationError("scenario JSON needs a 'slice_load' mixture");
    ScenarioSpec spec{BirthDeathRates{require_number(j, "lambda"), require_number(j, "eta"),
                                      require_int(j, "n_max")},
                      mixture_from_json(j["slice_load"]), require_number(j, "r_max")};
    spec.validate();
    return spec;
}

ScenarioSpec load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

void save_scenario(const std::string& path, const ScenarioSpec& spec) {
    write_json_file(path, scenario_to_json(spec));
}

json model_to_json(const FittedModel& model) {
    return {{"k_hat", model.k_hat},
            {"lambda_hat", model.lambda_hat},
            {"eta_hat", model.eta_hat},
            {"occupancy_probs", model.occupancy_probs},
            {"slice_mixture", mixture_to_json(model.slice_mixture)},
            {"aggregate_mixture", mixture_to_json(model.aggregate_mixture)}};
}

FittedModel model_from_json(const json& j) {
    if (!j.contains("occupancy_probs") || !j["occupancy_probs"].is_array())
        throw ValidationError("model JSON needs an 'occupancy_probs' array");
    FittedModel model{require_int(j, "k_hat"),
                      mixture_from_json(j.at("slice_mixture")),
                      require_number(j, "lambda_hat"),
                      require_number(j, "eta_hat"),
                      j["occupancy_probs"].get<std::vector<double>>(),
                      mixture_from_json(j.at("aggregate_mixture"))};
    return model;
}

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig config;
    if (j.is_null()) return config;
    if (!j.is_object()) throw ValidationError("pipeline config must be a JSON object");
    if (j.contains("bins")) config.bins = require_int(j, "bins");
    if (j.contains("window")) config.window = require_int(j, "window");
    if (j.contains("prominence")) config.prominence = require_number(j, "prominence");
    if (j.contains("mc_per_state")) config.mc_per_state = require_int(j, "mc_per_state");
    if (j.contains("restarts")) config.kmeans_restarts = require_int(j, "restarts");
    if (j.contains("max_iters")) config.kmeans_max_iters = require_int(j, "max_iters");
    config.validate();
    return config;
}

json pipeline_config_to_json(const PipelineConfig& config) {
    return {{"bins", config.bins},
            {"window", config.window},
            {"prominence", config.prominence},
            {"mc_per_state", config.mc_per_state},
            {"restarts", config.kmeans_restarts},
            {"max_iters", config.kmeans_max_iters}};
}

BenchConfig bench_config_from_json(const json& j) {
    BenchConfig config;
    if (j.is_null()) return config;
    if (!j.is_object()) throw ValidationError("bench config must be a JSON object");
    if (j.contains("trials")) config.trials = require_int(j, "trials");
    if (j.contains("n_obs")) config.n_obs = static_cast<std::size_t>(require_int(j, "n_obs"));
    if (j.contains("k_components")) config.k_components = require_int(j, "k_components");
    if (j.contains("mean_range")) {
        const auto& r = j["mean_range"];
        if (!r.is_array() || r.size() != 2)
            throw ValidationError("mean_range must be [lo, hi]");
        config.mean_lo = r[0].get<double>();
        config.mean_hi = r[1].get<double>();
    }
    if (j.contains("std_range")) {
        const auto& r = j["std_range"];
        if (!r.is_array() || r.size() != 2)
            throw ValidationError("std_range must be [lo, hi]");
        config.std_lo = r[0].get<double>();
        config.std_hi = r[1].get<double>();
    }
    if (j.contains("lambda")) config.rates.lambda = require_number(j, "lambda");
    if (j.contains("eta")) config.rates.eta = require_number(j, "eta");
    if (j.contains("n_max")) config.rates.n_max = require_int(j, "n_max");
    if (j.contains("r_max")) config.r_max = require_number(j, "r_max");
    if (j.contains("trace_horizon")) config.trace_horizon = require_number(j, "trace_horizon");
    if (j.contains("oracle_mc")) config.oracle_mc = static_cast<std::size_t>(require_int(j, "oracle_mc"));
    if (j.contains("master_seed")) config.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("threshold_grid")) {
        const auto& g = j["threshold_grid"];
        if (g.is_array()) {
            config.thresholds = g.get<std::vector<double>>();
        } else if (g.is_object()) {
            config.thresholds = threshold_grid(require_number(g, "lo"), require_number(g, "hi"),
                                               require_int(g, "steps"));
        } else {
            throw ValidationError("threshold_grid must be an array or {lo, hi, steps}");
        }
    }
    if (j.contains("pipeline")) config.pipeline = pipeline_config_from_json(j["pipeline"]);
    config.validate();
    return config;
}

BenchConfig load_bench_config(const std::string& path) {
    return bench_config_from_json(read_json_file(path));
}

json bench_config_to_json(const BenchConfig& config) {
    return {{"trials", config.trials},
            {"n_obs", config.n_obs},
            {"k_components", config.k_components},
            {"mean_range", {config.mean_lo, config.mean_hi}},
            {"std_range", {config.std_lo, config.std_hi}},
            {"lambda", config.rates.lambda},
            {"eta", config.rates.eta},
            {"n_max", config.rates.n_max},
            {"r_max", config.r_max},
            {"trace_horizon", config.trace_horizon},
            {"oracle_mc", config.oracle_mc},
            {"master_seed", config.master_seed},
            {"threshold_grid", config.resolved_thresholds()},
            {"pipeline", pipeline_config_to_json(config.pipeline)}};
}

json summary_to_json(const BenchSummary& summary) {
    return {{"trials", summary.trials},
            {"failed", summary.failed},
            {"error_rate",
             {{"mean", summary.mean},
              {"median", summary.median},
              {"p10", summary.p10},
              {"p25", summary.p25},
              {"p75", summary.p75},
              {"p90", summary.p90},
              {"min", summary.min},
              {"max", summary.max}}}};
}

json read_json_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("cannot parse JSON file " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

} // namespace slicerisk
