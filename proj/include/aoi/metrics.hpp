#ifndef AOI_METRICS_HPP_
#define AOI_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/age_core.hpp"
#include "aoi/channel.hpp"

namespace aoi {

class EmptyRunError : public std::runtime_error {
public:
    EmptyRunError() : std::runtime_error("no slots were accumulated") {}
};

struct AgeSample {
    std::int64_t slot = 0;
    double mean_age = 0.0;
};

/// Running sums over the measured slots of one run (or of several merged runs).
struct MetricsAccumulator {
    std::uint64_t slot_count = 0;
    std::uint64_t age_sum = 0;  ///< sum over slots and sources of h
    std::uint64_t deliveries = 0;
    std::uint64_t collisions = 0;
    std::uint64_t idles = 0;
    std::vector<std::uint64_t> per_source_deliveries;
    std::uint64_t active_sum = 0;  ///< sum over slots of eligible sources
    double threshold_sum = 0.0;

    std::int64_t sample_stride = 0;  ///< 0 disables the time series
    std::vector<AgeSample> samples;

    explicit MetricsAccumulator(std::size_t sources = 0, std::int64_t stride = 0)
        : per_source_deliveries(sources, 0), sample_stride(stride)
    {
    }

    /// Adds one slot. `states` must hold the ages sampled after that slot's
    /// arrivals; `slot` only feeds the optional time series.
    void accumulate(std::span<const SourceState> states, const SlotOutcome& outcome,
                    std::int64_t slot = 0);

    /// Policy-side per-slot extras.
    void record_policy(std::size_t active, std::int64_t threshold)
    {
        active_sum += active;
        threshold_sum += static_cast<double>(threshold);
    }

    /// Field-wise sum; both sides must track the same number of sources.
    void merge(const MetricsAccumulator& other);
};

struct RunMetrics {
    double naaoi = 0.0;
    double throughput = 0.0;
    double p_success = 0.0;
    double p_idle = 0.0;
    double p_collision = 0.0;
    double active_fraction = 0.0;
    double mean_threshold = 0.0;
};

/// NAAoI = age_sum / (M^2 * slots); the rest are per-slot frequencies.
/// Throws EmptyRunError when no slot was accumulated.
RunMetrics finalize(const MetricsAccumulator& acc, std::int64_t sources);

}  // namespace aoi

#endif  // AOI_METRICS_HPP_
