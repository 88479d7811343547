#ifndef AOI_SIMULATOR_HPP_
#define AOI_SIMULATOR_HPP_

#include <cstdint>

#include "aoi/metrics.hpp"
#include "aoi/policies.hpp"

namespace aoi {

struct SimulationParams {
    PolicyParams policy;
    std::int64_t horizon = 1;
    std::int64_t burn_in = 0;
    std::uint64_t seed = 0;  ///< seed of this run's own stream
    std::int64_t sample_stride = 0;
};

/**
 * Runs one replication.
 *
 * Each slot: arrivals, policy decision and channel resolution, then the age
 * update for the next slot. Ages are measured just after the arrivals. The
 * first `burn_in` slots are simulated but not measured.
 */
MetricsAccumulator simulate(const SimulationParams& params);

}  // namespace aoi

#endif  // AOI_SIMULATOR_HPP_
