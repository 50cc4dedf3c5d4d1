#ifndef SLICERISK_MIXTURE_HPP
#define SLICERISK_MIXTURE_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "slicerisk/rng.hpp"

namespace slicerisk {

// Standard normal density and CDF. The CDF goes through erfc, which keeps the
// absolute error near machine precision far into the tails.
inline double normal_pdf(double z) { return 0.3989422804014327 * std::exp(-0.5 * z * z); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865476); }

struct GaussianComponent {
    double weight = 0.0; // mixture mass, >= 0
    double mean = 0.0;   // resource-load units
    double stddev = 0.0; // resource-load units, > 0
};

// A Gaussian mixture left-truncated at zero: the per-slice load law and the
// re-fit aggregate-load law. Truncation renormalizes the mixture as a whole
// (one constant, the untruncated mass above zero), not each component.
// Immutable after construction; safe to share across threads.
class TruncatedMixture {
public:
    explicit TruncatedMixture(std::vector<GaussianComponent> components, double truncation = 0.0);

    const std::vector<GaussianComponent>& components() const { return components_; }
    double truncation() const { return truncation_; }
    // Untruncated mixture mass above the truncation point (the renormalizer).
    double mass_above_truncation() const { return mass_above_; }

    // Density at x; zero below the truncation point.
    double pdf(double x) const;
    // P(X <= x); zero at and below the truncation point, 1 in the limit.
    double cdf(double x) const;
    // P(X > x). Complements cdf exactly.
    double tail_prob(double x) const { return 1.0 - cdf(x); }

    // i.i.d. draws by rejection from the untruncated mixture (resample any
    // draw below the truncation point). Deterministic given the stream state.
    std::vector<double> sample(RngStream& rng, std::size_t count) const;

    // Largest mean + 12 standard deviations: effectively the whole support.
    double support_hint() const;

private:
    friend class MixtureSampler;

    std::vector<GaussianComponent> components_;
    std::vector<double> cumulative_weights_;
    double truncation_ = 0.0;
    double mass_above_ = 1.0;
};

// Sampling handle for hot loops. Uses Box-Muller, consuming uniforms in a
// fixed alternating pattern (3, 1, 3, 1, ...) independent of parameter values,
// so streams stay aligned across runs whose mixture parameters differ only
// slightly; negative-draw rejections are the sole (rare) desync source.
class MixtureSampler {
public:
    explicit MixtureSampler(const TruncatedMixture& mixture) : mixture_(&mixture) {}

    double draw(RngStream& rng);

private:
    const TruncatedMixture* mixture_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace slicerisk

#endif
