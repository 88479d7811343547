#include "aoi/age_core.hpp"

#include "aoi/rng.hpp"

namespace aoi {

std::vector<SourceState> initial_states(std::size_t sources)
{
    return std::vector<SourceState>(sources);
}

void draw_arrivals(Rng& rng, double theta, std::span<std::uint8_t> arrivals)
{
    for (auto& a : arrivals)
        a = rng.bernoulli(theta) ? 1 : 0;
}

void apply_arrivals(std::span<SourceState> states, std::span<const std::uint8_t> arrivals)
{
    if (states.size() != arrivals.size())
        throw SimulationIntegrityError("arrival vector length does not match source count");
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto& s = states[i];
        if (arrivals[i]) {
            s.w = 0;
            s.has_packet = true;
        } else {
            ++s.w;
        }
    }
}

void apply_deliveries(std::span<SourceState> states, std::optional<std::size_t> delivered)
{
    if (delivered) {
        if (*delivered >= states.size())
            throw SimulationIntegrityError("delivery index out of range");
        if (!states[*delivered].has_packet)
            throw SimulationIntegrityError("delivery reported for empty source "
                                           + std::to_string(*delivered));
    }
    for (auto& s : states)
        ++s.h;
    if (delivered) {
        auto& s = states[*delivered];
        s.h = s.w + 1;
        s.has_packet = false;
    }
}

void apply_deliveries(std::span<SourceState> states, std::span<const std::uint8_t> delivered)
{
    if (states.size() != delivered.size())
        throw SimulationIntegrityError("delivery vector length does not match source count");
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < delivered.size(); ++i) {
        if (!delivered[i])
            continue;
        if (index)
            throw SimulationIntegrityError("more than one delivery in a single slot");
        index = i;
    }
    apply_deliveries(states, index);
}

}  // namespace aoi
