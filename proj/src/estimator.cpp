#include "slicerisk/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slicerisk/errors.hpp"
#include "slicerisk/parallel.hpp"

namespace slicerisk {

namespace {
constexpr double kStdClamp = 1e-4;
constexpr std::size_t kMinEvents = 10;
constexpr std::size_t kMinPdfSamples = 100;

template <typename Fn>
auto pipeline_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

void check_occupancy_probs(const std::vector<double>& probs) {
    if (probs.size() < 2)
        throw ValidationError("occupancy probabilities need states 0..n_max with n_max >= 1");
    double sum = 0.0;
    for (const double p : probs) {
        if (!(p >= 0.0) || !(p <= 1.0 + 1e-12))
            throw ValidationError("occupancy probabilities must lie in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("occupancy probabilities must sum to 1");
}
} // namespace

void PipelineConfig::validate() const {
    if (bins < 10) throw ValidationError("bins must be >= 10");
    if (window < 1 || window % 2 == 0) throw ValidationError("window must be odd and >= 1");
    if (window > bins) throw ValidationError("window must not exceed bin count");
    if (!(prominence > 0.0) || !(prominence < 1.0))
        throw ValidationError("prominence must be in (0,1)");
    if (mc_per_state < 10000) throw ValidationError("mc_per_state must be >= 10000");
    if (kmeans_restarts < 1) throw ValidationError("kmeans_restarts must be >= 1");
    if (kmeans_max_iters < 1) throw ValidationError("kmeans_max_iters must be >= 1");
}

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

RateEstimate extract_rates(const LifecycleTrace& trace, int n_max) {
    if (n_max < 1)
        throw ValidationError("n_max must be >= 1");
    trace.validate(n_max);

    const std::size_t births = trace.count(EventKind::Birth);
    const std::size_t deaths = trace.count(EventKind::Death);
    if (births < kMinEvents) throw InsufficientTraceError("birth", births, kMinEvents);
    if (deaths < kMinEvents) throw InsufficientTraceError("death", deaths, kMinEvents);

    double unblocked_time = 0.0; // exposure for arrivals
    double occupancy_time = 0.0; // exposure for deaths, integral of n(t)
    int occ = trace.initial_occupancy;
    double prev = 0.0;
    auto accumulate = [&](double until) {
        const double dt = until - prev;
        if (occ < n_max) unblocked_time += dt;
        occupancy_time += occ * dt;
        prev = until;
    };
    for (const auto& e : trace.events) {
        accumulate(e.timestamp);
        occ = e.occupancy_after;
    }
    accumulate(trace.horizon);

    if (!(unblocked_time > 0.0))
        throw ValidationError("trace has no unblocked exposure time");
    if (!(occupancy_time > 0.0))
        throw ValidationError("trace has no occupied exposure time");
    return {static_cast<double>(births) / unblocked_time,
            static_cast<double>(deaths) / occupancy_time};
}

// ---------------------------------------------------------------------------
// Histogram, smoothing, peak counting
// ---------------------------------------------------------------------------

EmpiricalPdf empirical_pdf(std::span<const double> samples, int n_bins) {
    if (samples.size() < kMinPdfSamples)
        throw ValidationError("need at least 100 samples for an empirical pdf");
    if (n_bins < 10)
        throw ValidationError("need at least 10 bins");

    double max_sample = 0.0;
    for (const double x : samples) {
        if (!(x >= 0.0))
            throw ValidationError("load samples must be nonnegative");
        max_sample = std::max(max_sample, x);
    }
    if (!(max_sample > 0.0))
        throw ValidationError("all load samples are zero; histogram range is degenerate");

    const double hi = max_sample * 1.02;
    const double width = hi / n_bins;
    EmpiricalPdf pdf;
    pdf.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i)
        pdf.bin_edges[static_cast<std::size_t>(i)] = hi * i / n_bins;
    pdf.densities.assign(static_cast<std::size_t>(n_bins), 0.0);
    for (const double x : samples) {
        auto idx = static_cast<std::size_t>(x / width);
        idx = std::min(idx, static_cast<std::size_t>(n_bins) - 1);
        pdf.densities[idx] += 1.0;
    }
    const double norm = static_cast<double>(samples.size()) * width;
    for (auto& d : pdf.densities) d /= norm;
    return pdf;
}

EmpiricalPdf smooth(const EmpiricalPdf& pdf, int window) {
    const int bins = static_cast<int>(pdf.bin_count());
    if (window < 1 || window % 2 == 0 || window > bins)
        throw ValidationError("window must be odd and within [1, bin count]");

    EmpiricalPdf out;
    out.bin_edges = pdf.bin_edges;
    out.densities.resize(pdf.densities.size());
    const int half = (window - 1) / 2;
    for (int i = 0; i < bins; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(bins - 1, i + half);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += pdf.densities[static_cast<std::size_t>(j)];
        out.densities[static_cast<std::size_t>(i)] = acc / (hi - lo + 1);
    }
    double mass = 0.0;
    for (const double d : out.densities) mass += d;
    mass *= out.bin_width();
    if (!(mass > 0.0))
        throw ValidationError("smoothed pdf has zero mass");
    for (auto& d : out.densities) d /= mass;
    return out;
}

int detect_peaks(const EmpiricalPdf& pdf, double prominence_frac) {
    if (!(prominence_frac > 0.0) || !(prominence_frac < 1.0))
        throw ValidationError("prominence fraction must be in (0,1)");
    const auto& d = pdf.densities;
    const int bins = static_cast<int>(d.size());
    const double global_max = *std::max_element(d.begin(), d.end());
    const double required = prominence_frac * global_max;

    int count = 0;
    for (int i = 1; i + 1 < bins; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (!(d[ui] > d[ui - 1] && d[ui] > d[ui + 1])) continue;

        // Topographic prominence: on each side, the lowest level between the
        // peak and the nearest strictly higher bin (or the signal edge).
        double left_base = d[ui];
        for (int j = i - 1; j >= 0; --j) {
            const double v = d[static_cast<std::size_t>(j)];
            if (v > d[ui]) break;
            left_base = std::min(left_base, v);
        }
        double right_base = d[ui];
        for (int j = i + 1; j < bins; ++j) {
            const double v = d[static_cast<std::size_t>(j)];
            if (v > d[ui]) break;
            right_base = std::min(right_base, v);
        }
        const double prominence = d[ui] - std::max(left_base, right_base);
        if (prominence >= required) ++count;
    }
    return std::max(count, 1);
}

// ---------------------------------------------------------------------------
// One-dimensional k-means
// ---------------------------------------------------------------------------

namespace {

// Sorted samples plus prefix sums: cluster statistics and Lloyd updates in
// O(k log n) per iteration instead of O(n k).
struct SortedData {
    std::vector<double> xs;
    std::vector<double> sum1; // sum1[i] = sum of xs[0..i)
    std::vector<double> sum2;

    explicit SortedData(std::span<const double> samples) {
        xs.assign(samples.begin(), samples.end());
        std::sort(xs.begin(), xs.end());
        sum1.resize(xs.size() + 1, 0.0);
        sum2.resize(xs.size() + 1, 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sum1[i + 1] = sum1[i] + xs[i];
            sum2[i + 1] = sum2[i] + xs[i] * xs[i];
        }
    }

    std::size_t size() const { return xs.size(); }
    double segment_mean(std::size_t lo, std::size_t hi) const {
        return (sum1[hi] - sum1[lo]) / static_cast<double>(hi - lo);
    }
    double segment_sq_error(std::size_t lo, std::size_t hi, double center) const {
        const double n = static_cast<double>(hi - lo);
        return (sum2[hi] - sum2[lo]) - 2.0 * center * (sum1[hi] - sum1[lo]) + n * center * center;
    }
};

std::vector<double> kmeanspp_seed(const SortedData& data, int k, RngStream& rng) {
    const std::size_t n = data.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(data.xs[pick(rng)]);
    std::vector<double> dist2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = data.xs[i] - centers[0];
        dist2[i] = d * d;
    }
    for (int j = 1; j < k; ++j) {
        double total = std::accumulate(dist2.begin(), dist2.end(), 0.0);
        std::size_t chosen;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng); // all points coincide with a center already
        }
        centers.push_back(data.xs[chosen]);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = data.xs[i] - centers.back();
            dist2[i] = std::min(dist2[i], d * d);
        }
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

struct LloydResult {
    std::vector<std::size_t> cuts; // cuts[j] = end index of cluster j, cuts[k-1] = n
    std::vector<double> centers;
    double wcss = std::numeric_limits<double>::infinity();
    bool valid = false; // every cluster has at least 2 members
};

LloydResult lloyd(const SortedData& data, std::vector<double> centers, int max_iters) {
    const std::size_t n = data.size();
    const int k = static_cast<int>(centers.size());
    LloydResult result;
    result.cuts.assign(static_cast<std::size_t>(k), n);

    std::vector<std::size_t> prev_cuts;
    for (int iter = 0; iter < max_iters; ++iter) {
        // Nearest-center assignment for sorted centers: split at midpoints.
        for (int j = 0; j + 1 < k; ++j) {
            const double boundary = 0.5 * (centers[static_cast<std::size_t>(j)] +
                                           centers[static_cast<std::size_t>(j + 1)]);
            const auto it = std::upper_bound(data.xs.begin(), data.xs.end(), boundary);
            result.cuts[static_cast<std::size_t>(j)] = static_cast<std::size_t>(it - data.xs.begin());
        }
        result.cuts[static_cast<std::size_t>(k - 1)] = n;
        for (int j = 1; j < k; ++j) // enforce monotone cuts under duplicate centers
            result.cuts[static_cast<std::size_t>(j)] =
                std::max(result.cuts[static_cast<std::size_t>(j)], result.cuts[static_cast<std::size_t>(j - 1)]);

        if (result.cuts == prev_cuts) break;
        prev_cuts = result.cuts;

        std::size_t lo = 0;
        for (int j = 0; j < k; ++j) {
            const std::size_t hi = result.cuts[static_cast<std::size_t>(j)];
            if (hi > lo) centers[static_cast<std::size_t>(j)] = data.segment_mean(lo, hi);
            lo = hi;
        }
        std::sort(centers.begin(), centers.end());
    }

    result.centers = std::move(centers);
    result.wcss = 0.0;
    result.valid = true;
    std::size_t lo = 0;
    for (int j = 0; j < k; ++j) {
        const std::size_t hi = result.cuts[static_cast<std::size_t>(j)];
        if (hi - lo < 2) result.valid = false;
        if (hi > lo)
            result.wcss += data.segment_sq_error(lo, hi, result.centers[static_cast<std::size_t>(j)]);
        lo = hi;
    }
    return result;
}

} // namespace

TruncatedMixture fit_mixture(std::span<const double> samples, int k, RngStream& rng, int restarts,
                             int max_iters) {
    if (k < 1)
        throw ValidationError("component count must be >= 1");
    if (samples.size() < static_cast<std::size_t>(10 * k))
        throw ValidationError("need at least 10*k samples to fit " + std::to_string(k) + " components");
    if (restarts < 1 || max_iters < 1)
        throw ValidationError("restarts and max_iters must be >= 1");

    const SortedData data(samples);

    for (int kk = k; kk >= 1; --kk) {
        LloydResult best;
        for (int restart = 0; restart < restarts; ++restart) {
            auto run = lloyd(data, kmeanspp_seed(data, kk, rng), max_iters);
            if (run.valid && run.wcss < best.wcss) {
                best = std::move(run);
                best.valid = true;
            }
        }
        if (!best.valid) continue; // every restart collapsed a cluster: drop one component

        std::vector<GaussianComponent> comps;
        comps.reserve(static_cast<std::size_t>(kk));
        std::size_t lo = 0;
        for (int j = 0; j < kk; ++j) {
            const std::size_t hi = best.cuts[static_cast<std::size_t>(j)];
            const double mean = data.segment_mean(lo, hi);
            const double var = data.segment_sq_error(lo, hi, mean) / static_cast<double>(hi - lo);
            comps.push_back({static_cast<double>(hi - lo) / static_cast<double>(data.size()), mean,
                             std::max(std::sqrt(std::max(var, 0.0)), kStdClamp)});
            lo = hi;
        }
        return TruncatedMixture(std::move(comps));
    }
    throw ValidationError("k-means failed to produce any valid clustering"); // unreachable: k=1 always valid
}

// ---------------------------------------------------------------------------
// Composition and risk readout
// ---------------------------------------------------------------------------

namespace {
// Largest-remainder apportionment of pool slots across active states.
std::vector<std::size_t> proportional_counts(const std::vector<double>& weights, std::size_t total) {
    const std::size_t k = weights.size();
    std::vector<std::size_t> counts(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    remainders.reserve(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double share = weights[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(share);
        assigned += counts[i];
        remainders.emplace_back(share - static_cast<double>(counts[i]), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) counts[remainders[r % k].second]++;
    return counts;
}
} // namespace

ComposeResult compose_and_refit(const TruncatedMixture& slice_mixture,
                                const std::vector<double>& occupancy_probs,
                                const PipelineConfig& config, std::uint64_t seed, int threads) {
    check_occupancy_probs(occupancy_probs);
    config.validate();

    const int n_max = static_cast<int>(occupancy_probs.size()) - 1;
    double active_mass = 0.0;
    for (int n = 1; n <= n_max; ++n) active_mass += occupancy_probs[static_cast<std::size_t>(n)];
    if (active_mass < 1e-12)
        return {slice_mixture, {}, 0}; // the whole law is the atom at zero

    std::vector<double> weights(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        weights[static_cast<std::size_t>(n - 1)] = occupancy_probs[static_cast<std::size_t>(n)] / active_mass;
    const auto mc = static_cast<std::size_t>(config.mc_per_state);
    const std::size_t pool_size = static_cast<std::size_t>(n_max) * mc;
    const auto counts = proportional_counts(weights, pool_size);

    std::vector<std::vector<double>> batches(static_cast<std::size_t>(n_max));
    parallel_for_index(n_max, threads, [&](int task) {
        if (counts[static_cast<std::size_t>(task)] == 0) return;
        const int n = task + 1;
        auto rng = make_stream(derive_seed(seed, static_cast<std::uint64_t>(n)));
        MixtureSampler sampler(slice_mixture);
        auto& batch = batches[static_cast<std::size_t>(task)];
        batch.resize(mc);
        for (std::size_t s = 0; s < mc; ++s) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += sampler.draw(rng);
            batch[s] = sum;
        }
    });

    std::vector<double> pool;
    pool.reserve(pool_size);
    auto pool_rng = make_stream(derive_seed(seed, 0));
    std::uniform_int_distribution<std::size_t> pick(0, mc - 1);
    for (int n = 0; n < n_max; ++n) {
        const auto& batch = batches[static_cast<std::size_t>(n)];
        for (std::size_t c = 0; c < counts[static_cast<std::size_t>(n)]; ++c)
            pool.push_back(batch[pick(pool_rng)]);
    }

    const auto hist = empirical_pdf(pool, config.bins);
    const auto smoothed = smooth(hist, config.window);
    // Adjacent occupancy states overlap heavily at realistic load scales, so
    // the pooled histogram reads as near-unimodal and its peak count alone
    // under-orders the re-fit badly. The composed law has one convolution
    // component per materially weighted state by construction; floor the order
    // at two components per such state, still capped at 2 * n_max.
    int material_states = 0;
    for (int n = 1; n <= n_max; ++n)
        if (weights[static_cast<std::size_t>(n - 1)] >= 0.01) ++material_states;
    int k_agg = std::max(detect_peaks(smoothed, config.prominence), 2 * material_states);
    k_agg = std::min(k_agg, 2 * n_max);
    k_agg = std::min<int>(k_agg, static_cast<int>(pool.size() / 10));
    k_agg = std::max(k_agg, 1);

    auto fit_rng = make_stream(derive_seed(seed, static_cast<std::uint64_t>(n_max) + 1));
    auto aggregate = fit_mixture(pool, k_agg, fit_rng, config.kmeans_restarts, config.kmeans_max_iters);
    return {std::move(aggregate), std::move(pool), k_agg};
}

RiskCurve risk_from_model(const FittedModel& model, const std::vector<double>& thresholds) {
    check_occupancy_probs(model.occupancy_probs);
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ValidationError("threshold grid must be sorted ascending");

    const double active = 1.0 - model.occupancy_probs[0];
    RiskCurve curve;
    curve.thresholds = thresholds;
    curve.risks.reserve(thresholds.size());
    for (const double t : thresholds)
        curve.risks.push_back(std::clamp(active * model.aggregate_mixture.tail_prob(t), 0.0, 1.0));
    return curve;
}

PipelineResult run_pipeline(const ObservationSet& obs, int n_max,
                            const std::vector<double>& thresholds, const PipelineConfig& config,
                            std::uint64_t seed, int threads) {
    config.validate();
    if (!std::is_sorted(thresholds.begin(), thresholds.end()) || thresholds.empty())
        throw ValidationError("threshold grid must be nonempty and sorted ascending");

    const auto rates = pipeline_stage("extract_rates", [&] { return extract_rates(obs.trace, n_max); });

    const auto occupancy = pipeline_stage("erlang_weights", [&] {
        return stationary_distribution({rates.lambda_hat, rates.eta_hat, n_max});
    });

    const auto hist =
        pipeline_stage("empirical_pdf", [&] { return empirical_pdf(obs.load_samples, config.bins); });
    const auto smoothed = pipeline_stage("smooth", [&] { return smooth(hist, config.window); });
    const int k_hat =
        pipeline_stage("detect_peaks", [&] { return detect_peaks(smoothed, config.prominence); });

    auto slice_mixture = pipeline_stage("fit_mixture", [&] {
        const int k_cap = std::max(1, static_cast<int>(obs.load_samples.size() / 10));
        auto rng = make_stream(derive_seed(seed, 11));
        return fit_mixture(obs.load_samples, std::min(k_hat, k_cap), rng, config.kmeans_restarts,
                           config.kmeans_max_iters);
    });

    auto composed = pipeline_stage("compose_and_refit", [&] {
        return compose_and_refit(slice_mixture, occupancy, config, derive_seed(seed, 12), threads);
    });

    return pipeline_stage("risk_readout", [&]() -> PipelineResult {
        FittedModel model{k_hat,
                          std::move(slice_mixture),
                          rates.lambda_hat,
                          rates.eta_hat,
                          occupancy,
                          std::move(composed.aggregate)};
        RiskCurve risk = risk_from_model(model, thresholds);

        RiskCurve empirical;
        empirical.thresholds = thresholds;
        empirical.risks.reserve(thresholds.size());
        std::vector<double> sorted_pool = composed.pool;
        std::sort(sorted_pool.begin(), sorted_pool.end());
        const double active = 1.0 - model.occupancy_probs[0];
        for (const double t : thresholds) {
            double frac = 0.0;
            if (!sorted_pool.empty()) {
                const auto it = std::upper_bound(sorted_pool.begin(), sorted_pool.end(), t);
                frac = static_cast<double>(sorted_pool.end() - it) /
                       static_cast<double>(sorted_pool.size());
            }
            empirical.risks.push_back(std::clamp(active * frac, 0.0, 1.0));
        }
        return {std::move(model), std::move(risk), std::move(empirical)};
    });
}

} // namespace slicerisk
