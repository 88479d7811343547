#include "aoi/metrics.hpp"

namespace aoi {

void MetricsAccumulator::accumulate(std::span<const SourceState> states,
                                    const SlotOutcome& outcome, std::int64_t slot)
{
    std::uint64_t ages = 0;
    for (const auto& s : states)
        ages += static_cast<std::uint64_t>(s.h);
    age_sum += ages;
    ++slot_count;

    if (outcome.delivered) {
        ++deliveries;
        if (*outcome.delivered < per_source_deliveries.size())
            ++per_source_deliveries[*outcome.delivered];
    } else if (outcome.collision) {
        ++collisions;
    } else {
        ++idles;
    }

    if (sample_stride > 0 && slot % sample_stride == 0 && !states.empty())
        samples.push_back({slot, static_cast<double>(ages) / static_cast<double>(states.size())});
}

void MetricsAccumulator::merge(const MetricsAccumulator& other)
{
    if (per_source_deliveries.size() != other.per_source_deliveries.size())
        throw std::invalid_argument("cannot merge accumulators of different source counts");
    slot_count += other.slot_count;
    age_sum += other.age_sum;
    deliveries += other.deliveries;
    collisions += other.collisions;
    idles += other.idles;
    for (std::size_t i = 0; i < per_source_deliveries.size(); ++i)
        per_source_deliveries[i] += other.per_source_deliveries[i];
    active_sum += other.active_sum;
    threshold_sum += other.threshold_sum;
    samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

RunMetrics finalize(const MetricsAccumulator& acc, std::int64_t sources)
{
    if (acc.slot_count == 0)
        throw EmptyRunError();
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    const double k = static_cast<double>(acc.slot_count);
    const double m = static_cast<double>(sources);
    RunMetrics r;
    r.naaoi = static_cast<double>(acc.age_sum) / (m * m * k);
    r.throughput = static_cast<double>(acc.deliveries) / k;
    r.p_success = r.throughput;
    r.p_idle = static_cast<double>(acc.idles) / k;
    r.p_collision = static_cast<double>(acc.collisions) / k;
    r.active_fraction = static_cast<double>(acc.active_sum) / (m * k);
    r.mean_threshold = acc.threshold_sum / k;
    return r;
}

}  // namespace aoi
