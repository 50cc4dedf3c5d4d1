#ifndef SLICERISK_BENCH_HPP
#define SLICERISK_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slicerisk/birth_death.hpp"
#include "slicerisk/estimator.hpp"
#include "slicerisk/risk_curve.hpp"

namespace slicerisk {

// Full specification of a randomized benchmark run. Defaults mirror the
// standard setup: five components, means U(0.25, 0.75), deviations U(0, 0.1),
// ten slices on a capacity of five, 5000 load observations, 100 trials.
struct BenchConfig {
    int trials = 100;
    std::size_t n_obs = 5000;
    int k_components = 5;
    double mean_lo = 0.25, mean_hi = 0.75;
    double std_lo = 0.0, std_hi = 0.1;
    BirthDeathRates rates{5.0, 1.0, 10};
    double r_max = 5.0;
    std::vector<double> thresholds; // empty: 41 points on [0.5*r_max, 1.5*r_max]
    double trace_horizon = 0.0;     // <= 0: 1000 / eta
    std::size_t oracle_mc = 1000000;
    std::uint64_t master_seed = 1;
    PipelineConfig pipeline;

    void validate() const;
    std::vector<double> resolved_thresholds() const;
    double resolved_horizon() const;
};

struct TrialResult {
    int index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string message;
    double error_rate = 0.0;     // RMS relative error over the informative grid
    double error_rate_abs = 0.0; // RMS absolute error over the whole grid
    // scenario summary
    int k_components = 0;
    double lambda = 0.0, eta = 0.0;
    int n_max = 0;
    double r_max = 0.0;
    // per-threshold risk pairs
    std::vector<double> thresholds, true_risk, estimated_risk;
};

struct BenchSummary {
    int trials = 0;
    int failed = 0;
    double mean = 0.0, median = 0.0;
    double p10 = 0.0, p25 = 0.0, p75 = 0.0, p90 = 0.0;
    double min = 0.0, max = 0.0;
};

struct BenchResult {
    std::vector<TrialResult> trials;
    BenchSummary summary;
    bool excessive_failures = false; // more than 5% of trials failed
};

enum class SweepAxis { ComponentCount, MeanScale, StdScale };

struct SweepCell {
    double axis_value = 0.0;
    BenchResult result;
};

// RMS of the relative error (est - true) / true over grid points where the
// truth is at least 1e-4; points below that floor are uninformative tail.
double error_rate(const RiskCurve& estimated, const RiskCurve& truth);
// RMS of the absolute error over the whole grid, for transparency.
double error_rate_abs(const RiskCurve& estimated, const RiskCurve& truth);

// One randomized trial: scenario -> observations -> pipeline -> oracle ->
// error. Any pipeline failure is recorded in the result, never thrown.
TrialResult run_trial(const BenchConfig& config, int index, std::uint64_t trial_seed,
                      int threads = 1);

// Runs `trials` seeds derived from the master seed. Trials are independent
// and may execute concurrently; results are identical for any thread count.
BenchResult run_benchmark(const BenchConfig& config, int threads = 1);

// Re-runs the benchmark once per axis value with that parameter substituted.
// Cells share the master seed (common random numbers), so a single-value
// sweep reproduces run_benchmark exactly.
std::vector<SweepCell> sensitivity_sweep(const BenchConfig& config, SweepAxis axis,
                                         const std::vector<double>& values, int threads = 1);

BenchSummary summarize(const std::vector<TrialResult>& trials);
// Linear-interpolation quantile of a sorted vector.
double quantile(const std::vector<double>& sorted, double q);

SweepAxis sweep_axis_from_name(const std::string& name);

// Flat-file emission for the CLI.
void write_trials_csv(const std::string& path, const std::vector<TrialResult>& trials);
std::vector<double> read_trial_errors_csv(const std::string& path); // non-failed error rates
void write_curves_csv(const std::string& path, const std::vector<TrialResult>& trials);
void write_histogram_csv(const std::string& path, const std::vector<TrialResult>& trials, int bins = 20);
void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells);

} // namespace slicerisk

#endif
