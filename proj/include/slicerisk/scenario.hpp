#ifndef SLICERISK_SCENARIO_HPP
#define SLICERISK_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slicerisk/birth_death.hpp"
#include "slicerisk/mixture.hpp"
#include "slicerisk/risk_curve.hpp"
#include "slicerisk/rng.hpp"

namespace slicerisk {

// Full ground truth for one experiment: slice dynamics, the i.i.d. per-slice
// load law, and the capacity threshold.
struct ScenarioSpec {
    BirthDeathRates rates;
    TruncatedMixture slice_load;
    double r_max = 0.0;

    void validate() const;
};

// What the estimator is allowed to see: one lifecycle trace plus i.i.d.
// single-slice load snapshots.
struct ObservationSet {
    LifecycleTrace trace;
    std::vector<double> load_samples;

    std::size_t n_obs() const { return load_samples.size(); }
};

// Randomized scenario: component means uniform on [mean_lo, mean_hi], stddevs
// uniform on [std_lo, std_hi] (clamped up to 1e-4), weights k uniforms
// normalized to sum 1.
ScenarioSpec random_scenario(RngStream& rng, int k, double mean_lo, double mean_hi, double std_lo,
                             double std_hi, const BirthDeathRates& rates, double r_max);

ObservationSet observe(const ScenarioSpec& spec, std::size_t n_obs, double trace_horizon,
                       std::uint64_t seed);

// A Monte-Carlo risk curve plus a per-threshold standard-error estimate
// (binomial, with a +2/+4 count adjustment so zero-hit cells keep a sane
// nonzero error bar).
struct RiskEstimate {
    RiskCurve curve;
    std::vector<double> std_errors;
};

// Ground-truth overload risk, stratified by occupancy: one Monte-Carlo batch
// of aggregate loads per state n >= 1, weighted by the exact stationary
// probabilities. Batches run on derived seeds and may execute concurrently.
RiskEstimate oracle_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                         std::size_t mc_per_state, std::uint64_t seed, int threads = 1);

// Convenience wrapper returning only the curve.
RiskCurve true_overload_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                             std::size_t mc_per_state, std::uint64_t seed, int threads = 1);

// Unstratified comparison route: draw occupancy from the stationary law, then
// sum that many loads. Agrees with oracle_risk within Monte-Carlo noise.
RiskEstimate direct_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                         std::size_t n_draws, std::uint64_t seed);

void write_loads_csv(const std::string& path, const std::vector<double>& loads);
std::vector<double> read_loads_csv(const std::string& path);

} // namespace slicerisk

#endif
