#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "slicerisk/errors.hpp"
#include "slicerisk/json_io.hpp"
#include "slicerisk/scenario.hpp"
#include "support/oracles.hpp"

using namespace slicerisk;

namespace {

const BirthDeathRates kBenchRates{5.0, 1.0, 10};

ScenarioSpec benchmark_scenario(std::uint64_t seed) {
    auto rng = make_stream(seed);
    return random_scenario(rng, 5, 0.25, 0.75, 0.0, 0.1, kBenchRates, 5.0);
}

// Exceedance of a sum of n i.i.d. normals, ignoring the (negligible) truncation.
double normal_sum_tail(int n, double mean, double sd, double threshold) {
    if (n == 0) return threshold < 0.0 ? 1.0 : 0.0;
    const double mu = n * mean;
    const double sigma = sd * std::sqrt(static_cast<double>(n));
    return 1.0 - oracles::normal_cdf(threshold, mu, sigma);
}

} // namespace

TEST_CASE("random_scenario honors the benchmark generator contract") {
    const auto spec = benchmark_scenario(1);
    CHECK_NOTHROW(spec.validate());
    REQUIRE(spec.slice_load.components().size() == 5);
    double wsum = 0.0;
    for (const auto& c : spec.slice_load.components()) {
        CHECK(c.mean >= 0.25);
        CHECK(c.mean <= 0.75);
        CHECK(c.stddev >= 1e-4); // clamp engaged for tiny draws
        CHECK(c.stddev <= 0.1);
        CHECK(c.weight > 0.0);
        wsum += c.weight;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.r_max == 5.0);
    CHECK(spec.rates.n_max == 10);
}

TEST_CASE("random_scenario single component carries weight exactly 1") {
    auto rng = make_stream(2);
    const auto spec = random_scenario(rng, 1, 0.25, 0.75, 0.0, 0.1, kBenchRates, 5.0);
    REQUIRE(spec.slice_load.components().size() == 1);
    CHECK(spec.slice_load.components()[0].weight == 1.0);
}

TEST_CASE("random_scenario is deterministic and validates ranges") {
    auto rng_a = make_stream(3);
    auto rng_b = make_stream(3);
    const auto a = random_scenario(rng_a, 4, 0.25, 0.75, 0.0, 0.1, kBenchRates, 5.0);
    const auto b = random_scenario(rng_b, 4, 0.25, 0.75, 0.0, 0.1, kBenchRates, 5.0);
    for (std::size_t i = 0; i < a.slice_load.components().size(); ++i) {
        CHECK(a.slice_load.components()[i].mean == b.slice_load.components()[i].mean);
        CHECK(a.slice_load.components()[i].stddev == b.slice_load.components()[i].stddev);
        CHECK(a.slice_load.components()[i].weight == b.slice_load.components()[i].weight);
    }
    auto rng = make_stream(4);
    CHECK_THROWS_AS(random_scenario(rng, 0, 0.25, 0.75, 0.0, 0.1, kBenchRates, 5.0),
                    ValidationError);
    CHECK_THROWS_AS(random_scenario(rng, 2, 0.75, 0.25, 0.0, 0.1, kBenchRates, 5.0),
                    ValidationError);
    CHECK_THROWS_AS(random_scenario(rng, 2, 0.25, 0.75, 0.1, 0.1, kBenchRates, 5.0),
                    ValidationError);
}

TEST_CASE("observe produces the requested samples plus a trace") {
    const auto spec = benchmark_scenario(5);
    // horizon 200/eta puts the expected event count near 2000
    const auto obs = observe(spec, 5000, 200.0, 42);
    CHECK(obs.n_obs() == 5000);
    for (const double x : obs.load_samples) CHECK(x >= 0.0);
    CHECK(obs.trace.events.size() > 1000);
    CHECK(obs.trace.events.size() < 4000);

    const auto single = observe(spec, 1, 200.0, 42);
    CHECK(single.n_obs() == 1);
}

TEST_CASE("observe with no arrivals yields an eventless trace but full samples") {
    ScenarioSpec spec = benchmark_scenario(6);
    spec.rates.lambda = 0.0;
    const auto obs = observe(spec, 200, 50.0, 7);
    CHECK(obs.trace.events.empty());
    CHECK(obs.n_obs() == 200);
}

TEST_CASE("oracle risk vanishes beyond the aggregate support") {
    const auto spec = benchmark_scenario(8);
    double mean_hi = 0.0, std_hi = 0.0;
    for (const auto& c : spec.slice_load.components()) {
        mean_hi = std::max(mean_hi, c.mean);
        std_hi = std::max(std_hi, c.stddev);
    }
    const double far = spec.rates.n_max * (mean_hi + 12.0 * std_hi);
    const auto curve = true_overload_risk(spec, {far}, 20000, 3);
    CHECK(curve.risks[0] < 1e-10);
}

TEST_CASE("oracle risk at threshold zero equals one minus the idle probability") {
    const auto spec = benchmark_scenario(9);
    const auto p = stationary_distribution(spec.rates);
    const auto curve = true_overload_risk(spec, {0.0}, 20000, 4);
    CHECK(curve.risks[0] == doctest::Approx(1.0 - p[0]).epsilon(1e-12));
}

TEST_CASE("oracle matches the analytic normal-sum law in a saturated system") {
    // offered load 1000 pins the system at the cap; a single tight component
    // makes the aggregate analytically normal.
    const ScenarioSpec spec{{1000.0, 1.0, 10}, TruncatedMixture({{1.0, 0.5, 0.05}}), 5.0};
    const auto est = oracle_risk(spec, {5.0}, 200000, 11);
    const auto p = stationary_distribution(spec.rates);
    double analytic = 0.0;
    for (int n = 0; n <= 10; ++n) analytic += p[static_cast<std::size_t>(n)] * normal_sum_tail(n, 0.5, 0.05, 5.0);
    CHECK(analytic == doctest::Approx(0.495).epsilon(0.01)); // frozen scale check
    CHECK(std::abs(est.curve.risks[0] - analytic) < 3.0 * est.std_errors[0] + 1e-4);
}

TEST_CASE("oracle curve is monotone nonincreasing and deterministic across threads") {
    const auto spec = benchmark_scenario(10);
    const auto grid = threshold_grid(2.5, 7.5, 41);
    const auto a = true_overload_risk(spec, grid, 50000, 12, 1);
    const auto b = true_overload_risk(spec, grid, 50000, 12, 3);
    for (std::size_t i = 0; i + 1 < a.risks.size(); ++i)
        CHECK(a.risks[i + 1] <= a.risks[i]);
    CHECK(a.risks == b.risks);
}

TEST_CASE("stratified and direct estimators agree within Monte-Carlo error") {
    const auto spec = benchmark_scenario(13);
    const auto grid = threshold_grid(2.5, 7.5, 21);
    const auto strat = oracle_risk(spec, grid, 50000, 14);
    const auto direct = direct_risk(spec, grid, 200000, 15);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double se = std::hypot(strat.std_errors[i], direct.std_errors[i]);
        CHECK(std::abs(strat.curve.risks[i] - direct.curve.risks[i]) <= 3.0 * se);
    }
}

TEST_CASE("oracle risk is bracketed by the active-state bounds") {
    const ScenarioSpec spec{{5.0, 1.0, 10}, TruncatedMixture({{1.0, 0.5, 0.05}}), 5.0};
    const auto p = stationary_distribution(spec.rates);
    const auto grid = threshold_grid(1.0, 6.0, 11);
    const auto curve = true_overload_risk(spec, grid, 100000, 16);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lower = p[10] * normal_sum_tail(10, 0.5, 0.05, grid[i]);
        CHECK(curve.risks[i] <= 1.0 - p[0] + 1e-12);
        CHECK(curve.risks[i] >= lower - 3e-3); // Monte-Carlo slack
    }
}

TEST_CASE("scenario JSON round trip and loads CSV") {
    const auto spec = benchmark_scenario(17);
    const auto dir = std::filesystem::temp_directory_path() / "slicerisk_scenario_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "scenario.json").string();
    save_scenario(path, spec);
    const auto back = load_scenario(path);
    CHECK(back.rates.lambda == spec.rates.lambda);
    CHECK(back.rates.eta == spec.rates.eta);
    CHECK(back.rates.n_max == spec.rates.n_max);
    CHECK(back.r_max == spec.r_max);
    REQUIRE(back.slice_load.components().size() == spec.slice_load.components().size());
    for (std::size_t i = 0; i < spec.slice_load.components().size(); ++i)
        CHECK(back.slice_load.components()[i].mean == spec.slice_load.components()[i].mean);

    auto rng = make_stream(18);
    const auto loads = spec.slice_load.sample(rng, 250);
    const auto loads_path = (dir / "loads.csv").string();
    write_loads_csv(loads_path, loads);
    CHECK(read_loads_csv(loads_path) == loads);
    std::filesystem::remove_all(dir);
}

TEST_CASE("risk CSV carries the requested value column") {
    RiskCurve curve;
    curve.thresholds = {1.0, 2.0};
    curve.risks = {0.75, 0.25};
    const auto dir = std::filesystem::temp_directory_path() / "slicerisk_risk_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "risk.csv").string();
    write_risk_csv(path, curve, "p_overload");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "threshold,p_overload");
    std::getline(in, line);
    CHECK(line == "1,0.75");
    std::filesystem::remove_all(dir);
}
