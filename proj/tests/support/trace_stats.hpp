#ifndef SLICERISK_TESTS_TRACE_STATS_HPP
#define SLICERISK_TESTS_TRACE_STATS_HPP

#include <vector>

#include "slicerisk/birth_death.hpp"

namespace oracles {

// Fraction of the horizon spent in each occupancy state.
inline std::vector<double> occupancy_histogram(const slicerisk::LifecycleTrace& trace, int n_max) {
    std::vector<double> time_in(static_cast<std::size_t>(n_max) + 1, 0.0);
    int occ = trace.initial_occupancy;
    double prev = 0.0;
    for (const auto& e : trace.events) {
        time_in[static_cast<std::size_t>(occ)] += e.timestamp - prev;
        prev = e.timestamp;
        occ = e.occupancy_after;
    }
    time_in[static_cast<std::size_t>(occ)] += trace.horizon - prev;
    for (auto& t : time_in) t /= trace.horizon;
    return time_in;
}

} // namespace oracles

#endif
