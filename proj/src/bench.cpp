#include "slicerisk/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slicerisk/errors.hpp"
#include "slicerisk/io.hpp"
#include "slicerisk/parallel.hpp"

namespace slicerisk {

namespace {
constexpr double kTruthFloor = 1e-4;
constexpr double kFailureBudget = 0.05;

void check_same_grid(const RiskCurve& a, const RiskCurve& b) {
    if (a.thresholds.size() != b.thresholds.size())
        throw ValidationError("risk curves have different grid lengths");
    for (std::size_t i = 0; i < a.thresholds.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a.thresholds[i]), std::abs(b.thresholds[i])});
        if (std::abs(a.thresholds[i] - b.thresholds[i]) > 1e-12 * scale)
            throw ValidationError("risk curves are on different threshold grids");
    }
}
} // namespace

void BenchConfig::validate() const {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (n_obs < 1) throw ValidationError("n_obs must be >= 1");
    if (k_components < 1) throw ValidationError("k_components must be >= 1");
    if (!(mean_lo >= 0.0) || !(mean_lo < mean_hi))
        throw ValidationError("mean range must satisfy 0 <= lo < hi");
    if (!(std_lo >= 0.0) || !(std_lo < std_hi))
        throw ValidationError("std range must satisfy 0 <= lo < hi");
    rates.validate();
    if (!(r_max > 0.0)) throw ValidationError("r_max must be > 0");
    if (oracle_mc < 1) throw ValidationError("oracle_mc must be >= 1");
    if (!thresholds.empty() && !std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ValidationError("threshold grid must be sorted ascending");
    pipeline.validate();
}

std::vector<double> BenchConfig::resolved_thresholds() const {
    if (!thresholds.empty()) return thresholds;
    return threshold_grid(0.5 * r_max, 1.5 * r_max, 41);
}

double BenchConfig::resolved_horizon() const {
    return trace_horizon > 0.0 ? trace_horizon : 1000.0 / rates.eta;
}

double error_rate(const RiskCurve& estimated, const RiskCurve& truth) {
    check_same_grid(estimated, truth);
    double sum_sq = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < truth.risks.size(); ++i) {
        if (truth.risks[i] < kTruthFloor) continue;
        const double rel = (estimated.risks[i] - truth.risks[i]) / truth.risks[i];
        sum_sq += rel * rel;
        ++used;
    }
    if (used == 0)
        throw ValidationError("degenerate truth curve: all risks below the 1e-4 floor");
    return std::sqrt(sum_sq / static_cast<double>(used));
}

double error_rate_abs(const RiskCurve& estimated, const RiskCurve& truth) {
    check_same_grid(estimated, truth);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < truth.risks.size(); ++i) {
        const double d = estimated.risks[i] - truth.risks[i];
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(truth.risks.size()));
}

TrialResult run_trial(const BenchConfig& config, int index, std::uint64_t trial_seed, int threads) {
    config.validate();
    TrialResult result;
    result.index = index;
    result.seed = trial_seed;
    result.k_components = config.k_components;
    result.n_max = config.rates.n_max;
    result.r_max = config.r_max;
    result.lambda = config.rates.lambda;
    result.eta = config.rates.eta;

    const auto grid = config.resolved_thresholds();
    try {
        auto scenario_rng = make_stream(derive_seed(trial_seed, 1));
        const auto scenario =
            random_scenario(scenario_rng, config.k_components, config.mean_lo, config.mean_hi,
                            config.std_lo, config.std_hi, config.rates, config.r_max);
        const auto obs =
            observe(scenario, config.n_obs, config.resolved_horizon(), derive_seed(trial_seed, 2));
        const auto pipeline = run_pipeline(obs, config.rates.n_max, grid, config.pipeline,
                                           derive_seed(trial_seed, 3), threads);
        const auto truth =
            true_overload_risk(scenario, grid, config.oracle_mc, derive_seed(trial_seed, 4), threads);

        result.error_rate = error_rate(pipeline.risk, truth);
        result.error_rate_abs = error_rate_abs(pipeline.risk, truth);
        result.thresholds = grid;
        result.true_risk = truth.risks;
        result.estimated_risk = pipeline.risk.risks;
    } catch (const std::exception& e) {
        result.failed = true;
        result.message = e.what();
    }
    return result;
}

BenchResult run_benchmark(const BenchConfig& config, int threads) {
    config.validate();
    BenchResult bench;
    bench.trials.resize(static_cast<std::size_t>(config.trials));
    parallel_for_index(config.trials, threads, [&](int i) {
        // one trial per derived seed; inner stages stay single-threaded here
        bench.trials[static_cast<std::size_t>(i)] =
            run_trial(config, i, derive_seed(config.master_seed, static_cast<std::uint64_t>(i)), 1);
    });
    bench.summary = summarize(bench.trials);
    bench.excessive_failures =
        static_cast<double>(bench.summary.failed) >
        kFailureBudget * static_cast<double>(config.trials);
    return bench;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "component_count") return SweepAxis::ComponentCount;
    if (name == "mean_scale") return SweepAxis::MeanScale;
    if (name == "std_scale") return SweepAxis::StdScale;
    throw ValidationError("unknown sweep axis '" + name +
                          "' (expected component_count, mean_scale or std_scale)");
}

std::vector<SweepCell> sensitivity_sweep(const BenchConfig& config, SweepAxis axis,
                                         const std::vector<double>& values, int threads) {
    if (values.empty())
        throw ValidationError("sweep needs at least one axis value");
    std::vector<SweepCell> cells;
    cells.reserve(values.size());
    for (const double value : values) {
        BenchConfig cell_config = config;
        switch (axis) {
        case SweepAxis::ComponentCount: {
            const int k = static_cast<int>(std::llround(value));
            if (k < 1 || std::abs(value - k) > 1e-9)
                throw ValidationError("component_count values must be integers >= 1");
            cell_config.k_components = k;
            break;
        }
        case SweepAxis::MeanScale:
            if (!(value > 0.0)) throw ValidationError("mean_scale values must be > 0");
            cell_config.mean_lo = config.mean_lo * value;
            cell_config.mean_hi = config.mean_hi * value;
            break;
        case SweepAxis::StdScale:
            if (!(value > 0.0)) throw ValidationError("std_scale values must be > 0");
            cell_config.std_lo = config.std_lo * value;
            cell_config.std_hi = config.std_hi * value;
            break;
        }
        cells.push_back({value, run_benchmark(cell_config, threads)});
    }
    return cells;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BenchSummary summarize(const std::vector<TrialResult>& trials) {
    BenchSummary s;
    s.trials = static_cast<int>(trials.size());
    std::vector<double> errors;
    errors.reserve(trials.size());
    for (const auto& t : trials) {
        if (t.failed)
            ++s.failed;
        else
            errors.push_back(t.error_rate);
    }
    if (errors.empty()) return s;
    std::sort(errors.begin(), errors.end());
    double sum = 0.0;
    for (const double e : errors) sum += e;
    s.mean = sum / static_cast<double>(errors.size());
    s.median = quantile(errors, 0.5);
    s.p10 = quantile(errors, 0.10);
    s.p25 = quantile(errors, 0.25);
    s.p75 = quantile(errors, 0.75);
    s.p90 = quantile(errors, 0.90);
    s.min = errors.front();
    s.max = errors.back();
    return s;
}

// ---------------------------------------------------------------------------
// Flat-file emission
// ---------------------------------------------------------------------------

void write_trials_csv(const std::string& path, const std::vector<TrialResult>& trials) {
    auto out = open_output(path);
    out << "trial,seed,failed,error_rate,error_rate_abs,k_components,lambda,eta,n_max,r_max\n";
    for (const auto& t : trials) {
        out << t.index << ',' << t.seed << ',' << (t.failed ? 1 : 0) << ','
            << format_double(t.error_rate) << ',' << format_double(t.error_rate_abs) << ','
            << t.k_components << ',' << format_double(t.lambda) << ',' << format_double(t.eta)
            << ',' << t.n_max << ',' << format_double(t.r_max) << "\n";
    }
}

std::vector<double> read_trial_errors_csv(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("trial,seed,failed,error_rate", 0) != 0)
        throw ValidationError("unexpected trials CSV header");
    std::vector<double> errors;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < 5) throw ValidationError("malformed trials CSV row: " + line);
        if (fields[2] == "1") continue;
        errors.push_back(parse_double(fields[3], "trials CSV"));
    }
    return errors;
}

void write_curves_csv(const std::string& path, const std::vector<TrialResult>& trials) {
    auto out = open_output(path);
    out << "trial,threshold,p_overload_true,p_overload_estimated\n";
    for (const auto& t : trials) {
        if (t.failed) continue;
        for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
            out << t.index << ',' << format_double(t.thresholds[i]) << ','
                << format_double(t.true_risk[i]) << ',' << format_double(t.estimated_risk[i])
                << "\n";
        }
    }
}

void write_histogram_csv(const std::string& path, const std::vector<TrialResult>& trials, int bins) {
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    std::vector<double> errors;
    for (const auto& t : trials)
        if (!t.failed) errors.push_back(t.error_rate);
    auto out = open_output(path);
    out << "bin_lo,bin_hi,count\n";
    if (errors.empty()) return;
    const double hi = std::max(*std::max_element(errors.begin(), errors.end()), 1e-12);
    const double width = hi / bins;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (const double e : errors) {
        auto idx = static_cast<std::size_t>(e / width);
        idx = std::min(idx, static_cast<std::size_t>(bins) - 1);
        ++counts[idx];
    }
    for (int b = 0; b < bins; ++b) {
        out << format_double(width * b) << ',' << format_double(width * (b + 1)) << ','
            << counts[static_cast<std::size_t>(b)] << "\n";
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells) {
    auto out = open_output(path);
    out << "axis_value,trial,error_rate\n";
    for (const auto& cell : cells) {
        for (const auto& t : cell.result.trials) {
            if (t.failed) continue;
            out << format_double(cell.axis_value) << ',' << t.index << ','
                << format_double(t.error_rate) << "\n";
        }
    }
}

} // namespace slicerisk
