#include "slicerisk/birth_death.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slicerisk/errors.hpp"
#include "slicerisk/io.hpp"

namespace slicerisk {

void BirthDeathRates::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ValidationError("lambda must be finite and >= 0");
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw ValidationError("eta must be finite and > 0");
    if (n_max < 1)
        throw ValidationError("n_max must be >= 1");
}

std::size_t LifecycleTrace::count(EventKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [&](const LifecycleEvent& e) { return e.kind == kind; }));
}

void LifecycleTrace::validate(int n_max) const {
    if (!(horizon > 0.0))
        throw ValidationError("trace horizon must be > 0");
    if (initial_occupancy < 0 || initial_occupancy > n_max)
        throw ValidationError("initial occupancy outside [0, n_max]");
    int occ = initial_occupancy;
    double prev = 0.0;
    for (const auto& e : events) {
        if (!(e.timestamp > prev))
            throw ValidationError("trace timestamps must be strictly increasing");
        const int step = e.kind == EventKind::Birth ? 1 : -1;
        if (e.occupancy_after != occ + step)
            throw ValidationError("trace occupancy must change by exactly +-1 per event");
        occ = e.occupancy_after;
        if (occ < 0 || occ > n_max)
            throw ValidationError("trace occupancy outside [0, n_max]");
        prev = e.timestamp;
    }
    if (!events.empty() && events.back().timestamp > horizon)
        throw ValidationError("trace event beyond horizon");
}

std::vector<double> stationary_distribution(const BirthDeathRates& rates) {
    rates.validate();
    const double a = rates.offered_load();
    std::vector<double> weights(static_cast<std::size_t>(rates.n_max) + 1);
    weights[0] = 1.0;
    double sum = 1.0;
    for (int n = 1; n <= rates.n_max; ++n) {
        weights[static_cast<std::size_t>(n)] = weights[static_cast<std::size_t>(n - 1)] * a / n;
        sum += weights[static_cast<std::size_t>(n)];
        if (sum > 1e280) { // rescale before anything overflows
            for (int i = 0; i <= n; ++i) weights[static_cast<std::size_t>(i)] /= sum;
            sum = 1.0;
        }
    }
    for (auto& w : weights) w /= sum;
    return weights;
}

LifecycleTrace simulate_lifecycle(const BirthDeathRates& rates, double horizon, RngStream& rng,
                                  bool start_empty) {
    rates.validate();
    if (!(horizon > 0.0))
        throw ValidationError("horizon must be > 0");

    LifecycleTrace trace;
    trace.horizon = horizon;

    int occ = 0;
    if (!start_empty) {
        const auto p = stationary_distribution(rates);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double u = uniform(rng);
        double cum = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            cum += p[n];
            if (u <= cum || n + 1 == p.size()) {
                occ = static_cast<int>(n);
                break;
            }
        }
    }
    trace.initial_occupancy = occ;

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double t = 0.0;
    for (;;) {
        const double birth_rate = occ < rates.n_max ? rates.lambda : 0.0;
        const double death_rate = occ * rates.eta;
        const double total = birth_rate + death_rate;
        if (total <= 0.0) break; // absorbing: empty system with no arrivals
        std::exponential_distribution<double> holding(total);
        t += holding(rng);
        if (t > horizon) break;
        const bool birth = uniform(rng) * total < birth_rate;
        occ += birth ? 1 : -1;
        trace.events.push_back({t, birth ? EventKind::Birth : EventKind::Death, occ});
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const LifecycleTrace& trace) {
    out << "# horizon=" << format_double(trace.horizon)
        << " initial_occupancy=" << trace.initial_occupancy << "\n";
    out << "timestamp,kind,occupancy\n";
    for (const auto& e : trace.events) {
        out << format_double(e.timestamp) << ','
            << (e.kind == EventKind::Birth ? "birth" : "death") << ',' << e.occupancy_after << "\n";
    }
}

void write_trace_csv(const std::string& path, const LifecycleTrace& trace) {
    auto out = open_output(path);
    write_trace_csv(out, trace);
}

LifecycleTrace read_trace_csv(std::istream& in) {
    LifecycleTrace trace;
    std::string line;
    bool seen_meta = false;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "horizon") trace.horizon = parse_double(value, "trace metadata");
                if (key == "initial_occupancy")
                    trace.initial_occupancy = static_cast<int>(parse_double(value, "trace metadata"));
            }
            seen_meta = true;
            continue;
        }
        if (!seen_header) {
            if (line != "timestamp,kind,occupancy")
                throw ValidationError("trace CSV header must be 'timestamp,kind,occupancy'");
            seen_header = true;
            continue;
        }
        std::istringstream row(line);
        std::string ts, kind, occ;
        if (!std::getline(row, ts, ',') || !std::getline(row, kind, ',') || !std::getline(row, occ))
            throw ValidationError("malformed trace CSV row: " + line);
        LifecycleEvent e;
        e.timestamp = parse_double(ts, "trace CSV");
        if (kind == "birth")
            e.kind = EventKind::Birth;
        else if (kind == "death")
            e.kind = EventKind::Death;
        else
            throw ValidationError("trace CSV kind must be birth or death, got '" + kind + "'");
        e.occupancy_after = static_cast<int>(parse_double(occ, "trace CSV"));
        trace.events.push_back(e);
    }
    if (!seen_meta || !seen_header)
        throw ValidationError("trace CSV missing metadata or header line");
    return trace;
}

LifecycleTrace read_trace_csv(const std::string& path) {
    auto in = open_input(path);
    return read_trace_csv(in);
}

} // namespace slicerisk
