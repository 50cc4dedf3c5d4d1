#include "slicerisk/risk_curve.hpp"

#include <fstream>

#include "slicerisk/errors.hpp"
#include "slicerisk/io.hpp"

namespace slicerisk {

std::vector<double> threshold_grid(double lo, double hi, int steps) {
    if (steps < 1) throw ValidationError("threshold grid needs at least one point");
    if (steps == 1) return {lo};
    if (!(lo < hi)) throw ValidationError("threshold grid requires lo < hi");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    return grid;
}

void write_risk_csv(std::ostream& out, const RiskCurve& curve, const std::string& value_column) {
    if (curve.thresholds.size() != curve.risks.size())
        throw ValidationError("risk curve thresholds/risks length mismatch");
    out << "threshold," << value_column << "\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.risks[i]) << "\n";
}

void write_risk_csv(const std::string& path, const RiskCurve& curve, const std::string& value_column) {
    auto out = open_output(path);
    write_risk_csv(out, curve, value_column);
}

} // namespace slicerisk
