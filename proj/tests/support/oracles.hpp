#ifndef SLICERISK_TESTS_ORACLES_HPP
#define SLICERISK_TESTS_ORACLES_HPP

// Test-side reference implementations, kept independent of the library's
// evaluation paths: the normal CDF here comes from adaptive quadrature of the
// density, not from erfc.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double normal_density(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * 2.5066282746310002);
}

namespace detail {
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Integrates piecewise between sorted breakpoints, so narrow spikes cannot be
// stepped over by the adaptive refinement.
inline double integrate_with_breakpoints(const std::function<double(double)>& f, double a, double b,
                                         std::vector<double> breakpoints, double tol = 1e-10) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::clamp(breakpoints[i], a, b);
        const double hi = std::clamp(breakpoints[i + 1], a, b);
        if (hi > lo) total += integrate(f, lo, hi, tol);
    }
    return total;
}

// Phi((x - mean) / sd) by quadrature from the mean outward.
inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
    const double z = (x - mean) / sd;
    if (z < -14.0) return 0.0;
    if (z > 14.0) return 1.0;
    const auto density = [&](double t) { return normal_density(t, 0.0, 1.0); };
    return 0.5 + integrate(density, 0.0, z, 1e-14);
}

// Mean of a normal left-truncated at `cut`.
inline double truncated_normal_mean(double mean, double sd, double cut) {
    const double alpha = (cut - mean) / sd;
    const double tail = 1.0 - normal_cdf(alpha);
    return mean + sd * normal_density(alpha, 0.0, 1.0) / tail;
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return 0.5 * d;
}

} // namespace oracles

#endif
