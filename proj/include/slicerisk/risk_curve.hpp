#ifndef SLICERISK_RISK_CURVE_HPP
#define SLICERISK_RISK_CURVE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace slicerisk {

// Overload probability over a grid of capacity thresholds, true or estimated.
struct RiskCurve {
    std::vector<double> thresholds; // sorted ascending
    std::vector<double> risks;      // in [0,1], nonincreasing in threshold
};

// Inclusive uniform grid; steps == 1 degenerates to {lo}.
std::vector<double> threshold_grid(double lo, double hi, int steps);

void write_risk_csv(std::ostream& out, const RiskCurve& curve, const std::string& value_column);
void write_risk_csv(const std::string& path, const RiskCurve& curve, const std::string& value_column);

} // namespace slicerisk

#endif
