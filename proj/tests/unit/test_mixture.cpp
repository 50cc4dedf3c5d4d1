#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "slicerisk/errors.hpp"
#include "slicerisk/json_io.hpp"
#include "slicerisk/mixture.hpp"
#include "slicerisk/scenario.hpp"
#include "support/oracles.hpp"

using namespace slicerisk;

namespace {

TruncatedMixture single(double mean, double sd) {
    return TruncatedMixture({{1.0, mean, sd}});
}

TruncatedMixture symmetric_pair() {
    return TruncatedMixture({{0.5, 0.3, 0.05}, {0.5, 0.7, 0.05}});
}

// The randomized-benchmark mixture generator: 5 components, means U(0.25,0.75),
// deviations U(0, 0.1) clamped at 1e-4.
TruncatedMixture benchmark_mixture(std::uint64_t seed) {
    auto rng = make_stream(seed);
    return random_scenario(rng, 5, 0.25, 0.75, 0.0, 0.1, {5.0, 1.0, 10}, 5.0).slice_load;
}

double quadrature_mass(const TruncatedMixture& m) {
    std::vector<double> breaks;
    for (const auto& c : m.components())
        for (int j = -12; j <= 12; ++j) breaks.push_back(c.mean + j * c.stddev);
    return oracles::integrate_with_breakpoints([&](double x) { return m.pdf(x); }, 0.0,
                                               m.support_hint(), breaks, 1e-10);
}

} // namespace

TEST_CASE("pdf matches an independent high-precision evaluator") {
    const auto m = single(0.5, 0.1);
    // renormalizer = untruncated mass above zero, via the quadrature CDF oracle
    const double z = 1.0 - oracles::normal_cdf(0.0, 0.5, 0.1);
    const double expected = oracles::normal_density(0.5, 0.5, 0.1) / z;
    CHECK(m.pdf(0.5) == doctest::Approx(expected).epsilon(1e-11));
    CHECK(expected == doctest::Approx(3.9894239473).epsilon(1e-9)); // frozen oracle value
}

TEST_CASE("pdf is zero below the truncation point") {
    CHECK(single(0.5, 0.1).pdf(-0.1) == 0.0);
    CHECK(symmetric_pair().pdf(-1e-12) == 0.0);
}

TEST_CASE("pdf is symmetric for an equal-weight equal-sigma pair") {
    const auto m = symmetric_pair();
    CHECK(m.pdf(0.3) == doctest::Approx(m.pdf(0.7)).epsilon(1e-14));
}

TEST_CASE("cdf against the quadrature oracle") {
    const auto m = single(0.5, 0.1);
    const double f0 = oracles::normal_cdf(0.0, 0.5, 0.1);
    const double expected = (oracles::normal_cdf(0.5, 0.5, 0.1) - f0) / (1.0 - f0);
    CHECK(m.cdf(0.5) == doctest::Approx(expected).epsilon(1e-11));
    CHECK(m.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-6)); // truncation mass is negligible
}

TEST_CASE("cdf boundary and symmetry") {
    CHECK(single(0.5, 0.1).cdf(0.0) == 0.0);
    CHECK(single(0.5, 0.1).cdf(-3.0) == 0.0);
    CHECK(symmetric_pair().cdf(0.5) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("tail_prob complements cdf and covers the extremes") {
    const auto m = single(0.5, 0.1);
    CHECK(m.tail_prob(0.0) == 1.0);
    CHECK(m.tail_prob(0.5) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(m.tail_prob(0.5 + 20 * 0.1) < 1e-12);
    for (const double x : {0.1, 0.37, 0.5, 0.62, 1.4}) {
        CHECK(m.tail_prob(x) == 1.0 - m.cdf(x)); // definitionally exact
        CHECK(m.tail_prob(x) + m.cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("sampling: support, determinism, truncated mean") {
    const auto m = symmetric_pair();
    auto rng = make_stream(77);
    const auto draws = m.sample(rng, 1000);
    REQUIRE(draws.size() == 1000);
    for (const double x : draws) CHECK(x >= 0.0);

    auto rng_a = make_stream(123);
    auto rng_b = make_stream(123);
    CHECK(m.sample(rng_a, 500) == m.sample(rng_b, 500));

    const auto s = single(0.5, 0.1);
    auto rng_c = make_stream(2024);
    const auto big = s.sample(rng_c, 50000);
    double mean = 0.0;
    for (const double x : big) mean += x;
    mean /= static_cast<double>(big.size());
    const double expected = oracles::truncated_normal_mean(0.5, 0.1, 0.0);
    CHECK(mean == doctest::Approx(expected).epsilon(0.01));
    CHECK(std::abs(mean - 0.5) < 0.005);
}

TEST_CASE("pdf mass is 1 by quadrature for randomized benchmark mixtures") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto m = benchmark_mixture(seed);
        CHECK(quadrature_mass(m) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("sampler agrees with cdf in Kolmogorov-Smirnov distance") {
    for (const std::uint64_t seed : {11, 12}) {
        const auto m = benchmark_mixture(seed);
        auto rng = make_stream(seed * 1000);
        const auto draws = m.sample(rng, 100000);
        const double d = oracles::ks_distance(draws, [&](double x) { return m.cdf(x); });
        CHECK(d < 0.01);
    }
}

TEST_CASE("centered finite difference of cdf reproduces pdf") {
    const auto m = benchmark_mixture(3);
    const double h = 1e-6;
    for (double x = 0.05; x < m.support_hint(); x += 0.01) {
        const double density = m.pdf(x);
        if (density < 1e-3) continue;
        const double fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(density).epsilon(1e-4));
    }
}

TEST_CASE("validation rejects malformed mixtures") {
    CHECK_THROWS_AS(TruncatedMixture({}), ValidationError);
    CHECK_THROWS_AS(TruncatedMixture({{0.5, 0.5, 0.1}}), ValidationError);   // weights != 1
    CHECK_THROWS_AS(TruncatedMixture({{1.0, 0.5, 0.0}}), ValidationError);   // sigma = 0
    CHECK_THROWS_AS(TruncatedMixture({{1.0, 0.5, 1e-10}}), ValidationError); // below the guard
    CHECK_THROWS_AS(TruncatedMixture({{-0.2, 0.3, 0.1}, {1.2, 0.6, 0.1}}), ValidationError);
    CHECK_THROWS_AS(TruncatedMixture({{1.0, 0.5, 0.1}}, 0.5), ValidationError); // nonzero truncation
    CHECK_NOTHROW(TruncatedMixture({{1.0, 0.5, 1e-4}}));
}

TEST_CASE("JSON round trip preserves parameters") {
    const auto m = benchmark_mixture(9);
    const auto j = mixture_to_json(m);
    CHECK(j["truncation"].get<double>() == 0.0);
    CHECK(j["components"].size() == m.components().size());
    CHECK(j["components"][0].contains("std"));
    const auto back = mixture_from_json(j);
    REQUIRE(back.components().size() == m.components().size());
    for (std::size_t i = 0; i < m.components().size(); ++i) {
        CHECK(back.components()[i].weight == m.components()[i].weight);
        CHECK(back.components()[i].mean == m.components()[i].mean);
        CHECK(back.components()[i].stddev == m.components()[i].stddev);
    }
}
