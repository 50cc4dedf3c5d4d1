#ifndef SLICERISK_BIRTH_DEATH_HPP
#define SLICERISK_BIRTH_DEATH_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "slicerisk/rng.hpp"

namespace slicerisk {

// Parameters of the slice-occupancy birth-death chain: Poisson effective
// arrivals at rate lambda, exponential slice lifetimes with mean 1/eta, and a
// hard cap of n_max concurrently active slices (arrivals at the cap are lost).
struct BirthDeathRates {
    double lambda = 0.0; // admitted-request rate, >= 0
    double eta = 1.0;    // per-slice release rate, > 0
    int n_max = 1;       // active-slice cap, >= 1

    void validate() const;
    double offered_load() const { return lambda / eta; }
};

enum class EventKind { Birth, Death };

struct LifecycleEvent {
    double timestamp = 0.0;
    EventKind kind = EventKind::Birth;
    int occupancy_after = 0;
};

// Time-ordered record of slice creations and releases over one observation
// window. Occupancy between events is implied by initial_occupancy plus the
// +-1 steps of the events.
struct LifecycleTrace {
    std::vector<LifecycleEvent> events;
    double horizon = 0.0;
    int initial_occupancy = 0;

    std::size_t count(EventKind kind) const;
    // Checks ordering, occupancy step size and the [0, n_max] band.
    void validate(int n_max) const;
};

// Stationary occupancy distribution P_0..P_{n_max} of the loss chain:
// truncated Poisson weights (lambda/eta)^n / n!, normalized. Computed with a
// running rescale so large offered loads stay finite.
std::vector<double> stationary_distribution(const BirthDeathRates& rates);

// Continuous-time realization of the chain over [0, horizon]. Starts from a
// stationary draw unless start_empty is set. At occupancy n the next birth is
// exponential(lambda) (suppressed at n_max) and the next death exponential(n*eta).
LifecycleTrace simulate_lifecycle(const BirthDeathRates& rates, double horizon, RngStream& rng,
                                  bool start_empty = false);

// CSV with columns timestamp,kind,occupancy; horizon and initial occupancy
// ride along in a leading comment line.
void write_trace_csv(std::ostream& out, const LifecycleTrace& trace);
void write_trace_csv(const std::string& path, const LifecycleTrace& trace);
LifecycleTrace read_trace_csv(std::istream& in);
LifecycleTrace read_trace_csv(const std::string& path);

} // namespace slicerisk

#endif
