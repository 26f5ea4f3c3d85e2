#pragma once

#include <optional>

namespace retrial {

/// Breakdown of the mean orbit waiting time into idle, inbound-busy and outbound-busy parts.
struct WaitDecomposition {
    double idle = 0.0;      ///< E[W_0]
    double inbound = 0.0;   ///< E[W_1]
    double outbound = 0.0;  ///< E[W_2]

    double sum() const { return idle + inbound + outbound; }
};

struct SteadyStateMetrics {
    double mean_orbit = 0.0;         ///< E[N]
    double mean_system = 0.0;        ///< E[M]
    double availability = 0.0;       ///< P_a
    double failure_frequency = 0.0;  ///< P_f, failures per unit time
    double orbit_entry_prob = 0.0;   ///< P_w
    double mean_wait = 0.0;          ///< E[W]
    std::optional<WaitDecomposition> wait_decomposition;
};

}  // namespace retrial
