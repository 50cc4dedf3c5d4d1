// slicerisk command-line front end: scenario simulation, risk estimation, the
// ground-truth oracle, and the randomized benchmark/sweep harnesses. All
// outputs are flat CSV/JSON files; identical config + seed gives byte-identical
// files for any --threads value.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicerisk/bench.hpp"
#include "slicerisk/errors.hpp"
#include "slicerisk/estimator.hpp"
#include "slicerisk/json_io.hpp"
#include "slicerisk/scenario.hpp"

namespace fs = std::filesystem;
using namespace slicerisk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitExcessiveFailures = 2;

std::vector<double> parse_grid(const std::string& text) {
    // "lo:hi:steps"
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw ValidationError("grid must be lo:hi:steps, got '" + text + "'");
    const double lo = std::stod(text.substr(0, first));
    const double hi = std::stod(text.substr(first + 1, second - first - 1));
    const int steps = std::stoi(text.substr(second + 1));
    return threshold_grid(lo, hi, steps);
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!piece.empty()) values.push_back(std::stod(piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (values.empty()) throw ValidationError("empty value list");
    return values;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    return pipeline_config_from_json(read_json_file(path));
}

int cmd_simulate(const std::string& scenario_path, std::size_t n_obs, double horizon,
                 std::uint64_t seed, const std::string& out) {
    const auto spec = load_scenario(scenario_path);
    const double h = horizon > 0.0 ? horizon : 1000.0 / spec.rates.eta;
    const auto obs = observe(spec, n_obs, h, seed);
    const auto dir = prepare_out_dir(out);
    write_trace_csv((dir / "trace.csv").string(), obs.trace);
    write_loads_csv((dir / "loads.csv").string(), obs.load_samples);
    std::cout << "wrote " << (dir / "trace.csv").string() << " (" << obs.trace.events.size()
              << " events) and " << (dir / "loads.csv").string() << " (" << obs.n_obs()
              << " samples)\n";
    return kExitOk;
}

int cmd_estimate(const std::string& trace_path, const std::string& loads_path, int n_max,
                 const std::string& grid_text, const std::string& config_path, std::uint64_t seed,
                 int threads, const std::string& out) {
    ObservationSet obs;
    obs.trace = read_trace_csv(trace_path);
    obs.load_samples = read_loads_csv(loads_path);
    const auto grid = parse_grid(grid_text);
    const auto config = load_pipeline_config(config_path);

    const auto result = run_pipeline(obs, n_max, grid, config, seed, threads);
    const auto dir = prepare_out_dir(out);
    write_json_file((dir / "model.json").string(), model_to_json(result.model));
    write_risk_csv((dir / "risk_estimated.csv").string(), result.risk, "p_overload_estimated");
    write_risk_csv((dir / "risk_empirical.csv").string(), result.risk_empirical,
                   "p_overload_estimated");
    std::cout << "k_hat=" << result.model.k_hat << " lambda_hat=" << result.model.lambda_hat
              << " eta_hat=" << result.model.eta_hat << "\n";
    std::cout << "wrote model.json, risk_estimated.csv, risk_empirical.csv under " << dir.string()
              << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& scenario_path, const std::string& grid_text, std::size_t mc,
               std::uint64_t seed, int threads, const std::string& out) {
    const auto spec = load_scenario(scenario_path);
    const auto grid = grid_text.empty()
                          ? threshold_grid(0.5 * spec.r_max, 1.5 * spec.r_max, 41)
                          : parse_grid(grid_text);
    const auto curve = true_overload_risk(spec, grid, mc, seed, threads);
    const auto dir = prepare_out_dir(out);
    write_risk_csv((dir / "risk_true.csv").string(), curve, "p_overload");
    std::cout << "wrote " << (dir / "risk_true.csv").string() << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& config_path, int trials_override, std::uint64_t seed_override,
              bool seed_set, int threads, const std::string& out) {
    BenchConfig config = config_path.empty() ? BenchConfig{} : load_bench_config(config_path);
    if (trials_override > 0) config.trials = trials_override;
    if (seed_set) config.master_seed = seed_override;
    config.validate();

    const auto result = run_benchmark(config, threads);
    const auto dir = prepare_out_dir(out);
    write_trials_csv((dir / "trials.csv").string(), result.trials);
    write_curves_csv((dir / "curves.csv").string(), result.trials);
    write_histogram_csv((dir / "histogram.csv").string(), result.trials);
    auto summary = summary_to_json(result.summary);
    summary["config"] = bench_config_to_json(config);
    write_json_file((dir / "summary.json").string(), summary);

    std::cout << "trials=" << result.summary.trials << " failed=" << result.summary.failed
              << " median_error=" << result.summary.median << " mean_error=" << result.summary.mean
              << "\n";
    if (result.excessive_failures) {
        std::cerr << "error: more than 5% of trials failed\n";
        return kExitExcessiveFailures;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::string& values_text, std::uint64_t seed_override, bool seed_set,
              int trials_override, int threads, const std::string& out) {
    BenchConfig config = config_path.empty() ? BenchConfig{} : load_bench_config(config_path);
    if (trials_override > 0) config.trials = trials_override;
    if (seed_set) config.master_seed = seed_override;
    config.validate();

    const auto axis = sweep_axis_from_name(axis_name);
    const auto values = parse_value_list(values_text);
    const auto cells = sensitivity_sweep(config, axis, values, threads);

    const auto dir = prepare_out_dir(out);
    write_sweep_csv((dir / "sweep.csv").string(), cells);
    nlohmann::json per_cell = nlohmann::json::array();
    bool excessive = false;
    for (const auto& cell : cells) {
        auto j = summary_to_json(cell.result.summary);
        j["axis_value"] = cell.axis_value;
        per_cell.push_back(std::move(j));
        excessive = excessive || cell.result.excessive_failures;
        std::cout << axis_name << "=" << cell.axis_value
                  << " median_error=" << cell.result.summary.median
                  << " failed=" << cell.result.summary.failed << "\n";
    }
    write_json_file((dir / "sweep_summary.json").string(),
                    {{"axis", axis_name}, {"cells", std::move(per_cell)}});
    if (excessive) {
        std::cerr << "error: more than 5% of trials failed in at least one cell\n";
        return kExitExcessiveFailures;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overload-risk simulation and estimation for sliced multi-tenancy networks"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate observations from a scenario JSON");
    std::string sim_scenario, sim_out = ".";
    std::size_t sim_n_obs = 5000;
    double sim_horizon = 0.0;
    std::uint64_t sim_seed = 1;
    sim->add_option("--scenario", sim_scenario, "scenario JSON path")->required();
    sim->add_option("--n-obs", sim_n_obs, "number of load samples");
    sim->add_option("--horizon", sim_horizon, "trace horizon (default 1000/eta)");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output directory");

    // estimate
    auto* est = app.add_subcommand("estimate", "Run the estimation pipeline on observations");
    std::string est_trace, est_loads, est_grid = "2.5:7.5:41", est_config, est_out = ".";
    int est_n_max = 10, est_threads = 1;
    std::uint64_t est_seed = 1;
    est->add_option("--trace", est_trace, "lifecycle trace CSV")->required();
    est->add_option("--loads", est_loads, "load samples CSV")->required();
    est->add_option("--n-max", est_n_max, "active-slice cap");
    est->add_option("--grid", est_grid, "threshold grid lo:hi:steps");
    est->add_option("--config", est_config, "pipeline config JSON");
    est->add_option("--seed", est_seed, "random seed");
    est->add_option("--threads", est_threads, "worker threads (speed only)");
    est->add_option("--out", est_out, "output directory");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Ground-truth risk curve for a scenario JSON");
    std::string orc_scenario, orc_grid, orc_out = ".";
    std::size_t orc_mc = 1000000;
    int orc_threads = 1;
    std::uint64_t orc_seed = 1;
    orc->add_option("--scenario", orc_scenario, "scenario JSON path")->required();
    orc->add_option("--grid", orc_grid, "threshold grid lo:hi:steps (default around r_max)");
    orc->add_option("--mc", orc_mc, "Monte-Carlo samples per occupancy state");
    orc->add_option("--seed", orc_seed, "random seed");
    orc->add_option("--threads", orc_threads, "worker threads (speed only)");
    orc->add_option("--out", orc_out, "output directory");

    // bench
    auto* ben = app.add_subcommand("bench", "Randomized benchmark of estimation error");
    std::string ben_config, ben_out = ".";
    int ben_trials = 0, ben_threads = 1;
    std::uint64_t ben_seed = 0;
    bool ben_seed_set = false;
    ben->add_option("--config", ben_config, "bench config JSON (defaults if omitted)");
    ben->add_option("--trials", ben_trials, "override trial count");
    ben->add_option("--seed", ben_seed, "override master seed")->each([&](const std::string&) {
        ben_seed_set = true;
    });
    ben->add_option("--threads", ben_threads, "worker threads (speed only)");
    ben->add_option("--out", ben_out, "output directory");

    // sweep
    auto* swp = app.add_subcommand("sweep", "Sensitivity sweep over one model axis");
    std::string swp_config, swp_axis, swp_values, swp_out = ".";
    int swp_trials = 0, swp_threads = 1;
    std::uint64_t swp_seed = 0;
    bool swp_seed_set = false;
    swp->add_option("--config", swp_config, "bench config JSON (defaults if omitted)");
    swp->add_option("--axis", swp_axis, "component_count | mean_scale | std_scale")->required();
    swp->add_option("--values", swp_values, "comma-separated axis values")->required();
    swp->add_option("--trials", swp_trials, "override trial count per cell");
    swp->add_option("--seed", swp_seed, "override master seed")->each([&](const std::string&) {
        swp_seed_set = true;
    });
    swp->add_option("--threads", swp_threads, "worker threads (speed only)");
    swp->add_option("--out", swp_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_scenario, sim_n_obs, sim_horizon, sim_seed, sim_out);
        if (est->parsed())
            return cmd_estimate(est_trace, est_loads, est_n_max, est_grid, est_config, est_seed,
                                est_threads, est_out);
        if (orc->parsed())
            return cmd_oracle(orc_scenario, orc_grid, orc_mc, orc_seed, orc_threads, orc_out);
        if (ben->parsed())
            return cmd_bench(ben_config, ben_trials, ben_seed, ben_seed_set, ben_threads, ben_out);
        if (swp->parsed())
            return cmd_sweep(swp_config, swp_axis, swp_values, swp_seed, swp_seed_set, swp_trials,
                             swp_threads, swp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
