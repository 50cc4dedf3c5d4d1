#include "slicerisk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "slicerisk/errors.hpp"
#include "slicerisk/io.hpp"
#include "slicerisk/parallel.hpp"

namespace slicerisk {

namespace {
constexpr double kStdClamp = 1e-4; // generated stddevs never fall below this

// Counts, per threshold, how many samples strictly exceed it. The per-sample
// cell index is the number of grid points strictly below the sample; suffix
// sums turn cell counts into exceedance counts.
class ExceedanceCounter {
public:
    explicit ExceedanceCounter(const std::vector<double>& thresholds)
        : thresholds_(&thresholds), cells_(thresholds.size() + 1, 0) {}

    void add(double value) {
        const auto it = std::lower_bound(thresholds_->begin(), thresholds_->end(), value);
        ++cells_[static_cast<std::size_t>(it - thresholds_->begin())];
    }

    std::vector<std::size_t> exceed_counts() const {
        std::vector<std::size_t> out(thresholds_->size(), 0);
        std::size_t suffix = 0;
        for (std::size_t j = thresholds_->size(); j-- > 0;) {
            suffix += cells_[j + 1];
            out[j] = suffix;
        }
        return out;
    }

private:
    const std::vector<double>* thresholds_;
    std::vector<std::size_t> cells_;
};

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty())
        throw ValidationError("threshold grid must be nonempty");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ValidationError("threshold grid must be sorted ascending");
}

double adjusted_variance(std::size_t hits, std::size_t n) {
    const double p = (static_cast<double>(hits) + 2.0) / (static_cast<double>(n) + 4.0);
    return p * (1.0 - p) / static_cast<double>(n);
}
} // namespace

void ScenarioSpec::validate() const {
    rates.validate();
    if (!(r_max > 0.0))
        throw ValidationError("r_max must be > 0");
}

ScenarioSpec random_scenario(RngStream& rng, int k, double mean_lo, double mean_hi, double std_lo,
                             double std_hi, const BirthDeathRates& rates, double r_max) {
    if (k < 1)
        throw ValidationError("component count must be >= 1");
    if (!(mean_lo >= 0.0) || !(mean_lo < mean_hi))
        throw ValidationError("mean range must satisfy 0 <= lo < hi");
    if (!(std_lo >= 0.0) || !(std_lo < std_hi))
        throw ValidationError("std range must satisfy 0 <= lo < hi");
    rates.validate();

    std::uniform_real_distribution<double> mean_dist(mean_lo, mean_hi);
    std::uniform_real_distribution<double> std_dist(std_lo, std_hi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<GaussianComponent> comps(static_cast<std::size_t>(k));
    for (auto& c : comps) c.mean = mean_dist(rng);
    for (auto& c : comps) c.stddev = std::max(std_dist(rng), kStdClamp);
    double wsum = 0.0;
    for (auto& c : comps) {
        c.weight = 1.0 - unit(rng); // uniform on (0, 1]
        wsum += c.weight;
    }
    for (auto& c : comps) c.weight /= wsum;

    return ScenarioSpec{rates, TruncatedMixture(std::move(comps)), r_max};
}

ObservationSet observe(const ScenarioSpec& spec, std::size_t n_obs, double trace_horizon,
                       std::uint64_t seed) {
    spec.validate();
    if (n_obs < 1)
        throw ValidationError("n_obs must be >= 1");
    if (!(trace_horizon > 0.0))
        throw ValidationError("trace horizon must be > 0");

    ObservationSet obs;
    auto load_rng = make_stream(derive_seed(seed, 1));
    obs.load_samples = spec.slice_load.sample(load_rng, n_obs);
    auto trace_rng = make_stream(derive_seed(seed, 2));
    obs.trace = simulate_lifecycle(spec.rates, trace_horizon, trace_rng);
    return obs;
}

RiskEstimate oracle_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                         std::size_t mc_per_state, std::uint64_t seed, int threads) {
    spec.validate();
    check_thresholds(thresholds);
    if (mc_per_state < 1)
        throw ValidationError("mc_per_state must be >= 1");

    const auto occupancy = stationary_distribution(spec.rates);
    const int n_max = spec.rates.n_max;
    const std::size_t grid = thresholds.size();

    std::vector<std::vector<std::size_t>> exceed(static_cast<std::size_t>(n_max));
    parallel_for_index(n_max, threads, [&](int task) {
        const int n = task + 1;
        auto rng = make_stream(derive_seed(seed, static_cast<std::uint64_t>(n)));
        MixtureSampler sampler(spec.slice_load);
        ExceedanceCounter counter(thresholds);
        for (std::size_t s = 0; s < mc_per_state; ++s) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += sampler.draw(rng);
            counter.add(sum);
        }
        exceed[static_cast<std::size_t>(task)] = counter.exceed_counts();
    });

    RiskEstimate est;
    est.curve.thresholds = thresholds;
    est.curve.risks.assign(grid, 0.0);
    est.std_errors.assign(grid, 0.0);
    for (std::size_t j = 0; j < grid; ++j) {
        double risk = thresholds[j] < 0.0 ? occupancy[0] : 0.0; // empty system carries load 0
        double var = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            const double pn = occupancy[static_cast<std::size_t>(n)];
            const std::size_t hits = exceed[static_cast<std::size_t>(n - 1)][j];
            risk += pn * static_cast<double>(hits) / static_cast<double>(mc_per_state);
            var += pn * pn * adjusted_variance(hits, mc_per_state);
        }
        est.curve.risks[j] = risk;
        est.std_errors[j] = std::sqrt(var);
    }
    return est;
}

RiskCurve true_overload_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                             std::size_t mc_per_state, std::uint64_t seed, int threads) {
    return oracle_risk(spec, thresholds, mc_per_state, seed, threads).curve;
}

RiskEstimate direct_risk(const ScenarioSpec& spec, const std::vector<double>& thresholds,
                         std::size_t n_draws, std::uint64_t seed) {
    spec.validate();
    check_thresholds(thresholds);
    if (n_draws < 1)
        throw ValidationError("n_draws must be >= 1");

    const auto occupancy = stationary_distribution(spec.rates);
    std::vector<double> cum(occupancy.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < occupancy.size(); ++n) {
        acc += occupancy[n];
        cum[n] = acc;
    }
    cum.back() = 1.0;

    auto rng = make_stream(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MixtureSampler sampler(spec.slice_load);
    ExceedanceCounter counter(thresholds);
    for (std::size_t s = 0; s < n_draws; ++s) {
        const double u = unit(rng);
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        const int n = static_cast<int>(it - cum.begin());
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += sampler.draw(rng);
        counter.add(sum);
    }

    const auto hits = counter.exceed_counts();
    RiskEstimate est;
    est.curve.thresholds = thresholds;
    est.curve.risks.reserve(hits.size());
    est.std_errors.reserve(hits.size());
    for (const auto h : hits) {
        est.curve.risks.push_back(static_cast<double>(h) / static_cast<double>(n_draws));
        est.std_errors.push_back(std::sqrt(adjusted_variance(h, n_draws)));
    }
    return est;
}

void write_loads_csv(const std::string& path, const std::vector<double>& loads) {
    auto out = open_output(path);
    out << "load\n";
    for (const double v : loads) out << format_double(v) << "\n";
}

std::vector<double> read_loads_csv(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || line != "load")
        throw ValidationError("loads CSV header must be 'load'");
    std::vector<double> loads;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        loads.push_back(parse_double(line, "loads CSV"));
    }
    return loads;
}

} // namespace slicerisk
