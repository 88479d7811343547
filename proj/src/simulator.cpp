#include "aoi/simulator.hpp"

#include "aoi/rng.hpp"

namespace aoi {

MetricsAccumulator simulate(const SimulationParams& params)
{
    if (params.horizon < 1)
        throw std::domain_error("horizon must be at least 1");
    if (params.burn_in < 0)
        throw std::domain_error("burn-in must be non-negative");

    const auto sources = static_cast<std::size_t>(params.policy.sources);
    auto policy = make_policy(params.policy);
    auto states = initial_states(sources);
    Flags arrivals(sources, 0);
    Rng rng(params.seed);
    MetricsAccumulator acc(sources, params.sample_stride);

    const std::int64_t total = params.burn_in + params.horizon;
    for (std::int64_t k = 1; k <= total; ++k) {
        draw_arrivals(rng, params.policy.theta, arrivals);
        apply_arrivals(states, arrivals);
        const SlotOutcome outcome = policy->step(states, rng);
        if (k > params.burn_in) {
            acc.accumulate(states, outcome, k - params.burn_in);
            acc.record_policy(policy->last_active(), policy->threshold());
        }
        apply_deliveries(states, outcome.delivered);
    }
    return acc;
}

}  // namespace aoi
