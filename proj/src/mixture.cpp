#include "slicerisk/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "slicerisk/errors.hpp"

namespace slicerisk {

namespace {
constexpr double kWeightSumTolerance = 1e-9;
constexpr double kMinStddev = 1e-9; // below this a component is a numerical point mass
constexpr int kMaxRejections = 100000;
} // namespace

TruncatedMixture::TruncatedMixture(std::vector<GaussianComponent> components, double truncation)
    : components_(std::move(components)), truncation_(truncation) {
    if (truncation_ != 0.0)
        throw ValidationError("mixture truncation point must be 0");
    if (components_.empty())
        throw ValidationError("mixture needs at least one component");

    double weight_sum = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0))
            throw ValidationError("component weight must be nonnegative");
        if (!(c.stddev > 0.0) || c.stddev < kMinStddev)
            throw ValidationError("component stddev must be positive (>= 1e-9)");
        if (!std::isfinite(c.mean) || !std::isfinite(c.weight) || !std::isfinite(c.stddev))
            throw ValidationError("component parameters must be finite");
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > kWeightSumTolerance)
        throw ValidationError("component weights must sum to 1");

    cumulative_weights_.reserve(components_.size());
    double cum = 0.0;
    double mass = 0.0;
    for (const auto& c : components_) {
        cum += c.weight;
        cumulative_weights_.push_back(cum);
        mass += c.weight * normal_cdf((c.mean - truncation_) / c.stddev);
    }
    cumulative_weights_.back() = 1.0;
    mass_above_ = mass;
    if (!(mass_above_ > 0.0))
        throw ValidationError("mixture has no mass above the truncation point");
}

double TruncatedMixture::pdf(double x) const {
    if (x < truncation_) return 0.0;
    double dens = 0.0;
    for (const auto& c : components_)
        dens += c.weight * normal_pdf((x - c.mean) / c.stddev) / c.stddev;
    return dens / mass_above_;
}

double TruncatedMixture::cdf(double x) const {
    if (x <= truncation_) return 0.0;
    double above = 0.0; // untruncated mass in (x, inf), summed directly for tail accuracy
    for (const auto& c : components_)
        above += c.weight * normal_cdf((c.mean - x) / c.stddev);
    const double p = 1.0 - above / mass_above_;
    return std::clamp(p, 0.0, 1.0);
}

double TruncatedMixture::support_hint() const {
    double hi = truncation_;
    for (const auto& c : components_)
        hi = std::max(hi, c.mean + 12.0 * c.stddev);
    return hi;
}

std::vector<double> TruncatedMixture::sample(RngStream& rng, std::size_t count) const {
    if (count == 0)
        throw ValidationError("sample count must be >= 1");
    std::vector<double> out;
    out.reserve(count);
    MixtureSampler sampler(*this);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.draw(rng));
    return out;
}

double MixtureSampler::draw(RngStream& rng) {
    const auto& m = *mixture_;
    constexpr double kTwoPi = 6.283185307179586;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        const double u = uniform_(rng);
        const auto it = std::lower_bound(m.cumulative_weights_.begin(), m.cumulative_weights_.end(), u);
        const std::size_t idx =
            std::min(static_cast<std::size_t>(it - m.cumulative_weights_.begin()), m.components_.size() - 1);
        const auto& c = m.components_[idx];
        double z;
        if (has_cached_) {
            z = cached_normal_;
            has_cached_ = false;
        } else {
            const double u1 = 1.0 - uniform_(rng); // (0, 1], keeps the log finite
            const double u2 = uniform_(rng);
            const double r = std::sqrt(-2.0 * std::log(u1));
            z = r * std::cos(kTwoPi * u2);
            cached_normal_ = r * std::sin(kTwoPi * u2);
            has_cached_ = true;
        }
        const double x = c.mean + c.stddev * z;
        if (x >= m.truncation_) return x;
    }
    throw ValidationError("rejection sampler exceeded retry budget; mixture mass above 0 is negligible");
}

} // namespace slicerisk
