#ifndef SLICERISK_ESTIMATOR_HPP
#define SLICERISK_ESTIMATOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "slicerisk/mixture.hpp"
#include "slicerisk/risk_curve.hpp"
#include "slicerisk/rng.hpp"
#include "slicerisk/scenario.hpp"

namespace slicerisk {

// Density histogram with uniform bins: the empirical load PDF the mixture
// order is read off from.
struct EmpiricalPdf {
    std::vector<double> bin_edges; // length B+1, strictly increasing
    std::vector<double> densities; // length B, mass sums to 1

    double bin_width() const { return bin_edges[1] - bin_edges[0]; }
    std::size_t bin_count() const { return densities.size(); }
};

// Knobs of the estimation pipeline. Every field is optional in the JSON form;
// defaults resolve five components at the benchmark's load scales.
struct PipelineConfig {
    int bins = 100;               // histogram resolution
    int window = 5;               // moving-average width (odd)
    double prominence = 0.05;     // peak prominence, fraction of global max
    int mc_per_state = 30000;     // aggregate draws per occupancy state
    int kmeans_restarts = 10;     // k-means++ restarts per fit
    int kmeans_max_iters = 300;

    void validate() const;
};

struct RateEstimate {
    double lambda_hat = 0.0;
    double eta_hat = 0.0;
};

// Everything the pipeline learned from one observation set.
struct FittedModel {
    int k_hat = 1;                        // detected single-slice component count
    TruncatedMixture slice_mixture;       // fitted per-slice load law
    double lambda_hat = 0.0;
    double eta_hat = 0.0;
    std::vector<double> occupancy_probs;  // Erlang weights from the estimated rates
    TruncatedMixture aggregate_mixture;   // re-fit of the composed load
};

struct PipelineResult {
    FittedModel model;
    RiskCurve risk;           // read off the re-fit aggregate mixture (default output)
    RiskCurve risk_empirical; // tail frequency of the raw composed pool, for comparison
};

// Maximum-likelihood rates for the censored birth-death record: births over
// time spent below the cap (arrivals at the cap are unobservable), deaths over
// integrated occupancy-time. Needs at least 10 events of each kind.
RateEstimate extract_rates(const LifecycleTrace& trace, int n_max);

// Histogram over [0, 1.02 * max sample], normalized to unit mass.
EmpiricalPdf empirical_pdf(std::span<const double> samples, int n_bins);

// Centered moving average; edge bins average over the available window.
// Renormalized, so total mass stays exactly 1.
EmpiricalPdf smooth(const EmpiricalPdf& pdf, int window);

// Number of interior strict local maxima with topographic prominence at least
// prominence_frac of the global maximum; never less than 1.
int detect_peaks(const EmpiricalPdf& pdf, double prominence_frac);

// One-dimensional k-means (k-means++ seeding, best-of-restarts by
// within-cluster sum of squares); each cluster becomes one Gaussian component
// with the cluster's sample mean, sample stddev (clamped to 1e-4) and mass
// fraction. Clusters thinner than 2 members invalidate a restart; if every
// restart collapses, k is reduced by one and the fit retried, down to k = 1.
TruncatedMixture fit_mixture(std::span<const double> samples, int k, RngStream& rng,
                             int restarts = 10, int max_iters = 300);

struct ComposeResult {
    TruncatedMixture aggregate;
    std::vector<double> pool; // the weighted aggregate-load sample pool (empty if no active-state mass)
    int refit_k = 0;          // component count used for the re-fit, 0 if no fit ran
};

// Monte-Carlo composition: per occupancy state n >= 1, mc_per_state sums of n
// slice draws; states are resampled into one pool weighted by occupancy_probs,
// and the pool is re-fit through the histogram -> smooth -> peaks -> k-means
// chain. The re-fit order is the pooled peak count floored at two components
// per materially weighted state and capped at 2 * n_max. The empty state is an
// atom at zero and stays outside the mixture. Per-state batches run on derived
// seeds.
ComposeResult compose_and_refit(const TruncatedMixture& slice_mixture,
                                const std::vector<double>& occupancy_probs,
                                const PipelineConfig& config, std::uint64_t seed, int threads = 1);

// risk(t) = (1 - P0_hat) * tail of the aggregate mixture; the empty-state atom
// carries the remaining mass. Clamped to [0, 1].
RiskCurve risk_from_model(const FittedModel& model, const std::vector<double>& thresholds);

// Full chain: rates -> Erlang weights -> histogram -> smoothing -> peak count
// -> k-means slice fit -> Monte-Carlo composition and re-fit -> risk readout.
// Pure function of (observations, config, seed); failures carry their stage.
PipelineResult run_pipeline(const ObservationSet& obs, int n_max,
                            const std::vector<double>& thresholds, const PipelineConfig& config,
                            std::uint64_t seed, int threads = 1);

} // namespace slicerisk

#endif
