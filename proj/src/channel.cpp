#include "aoi/channel.hpp"

#include <stdexcept>

#include "aoi/rng.hpp"

namespace aoi {

SlotOutcome resolve_slot(std::span<const std::uint8_t> transmit)
{
    SlotOutcome out;
    std::size_t attempts = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < transmit.size(); ++i) {
        if (transmit[i]) {
            ++attempts;
            last = i;
        }
    }
    if (attempts == 0)
        out.idle = true;
    else if (attempts == 1)
        out.delivered = last;
    else
        out.collision = true;
    return out;
}

SlotOutcome resolve_slot_idealized(std::span<const std::uint8_t> active, double success_prob,
                                   Rng& rng)
{
    if (!(success_prob >= 0.0 && success_prob <= 1.0))
        throw std::domain_error("success probability must lie in [0, 1]");

    SlotOutcome out;
    std::size_t count = 0;
    for (auto a : active)
        count += a ? 1 : 0;
    if (count == 0) {
        out.idle = true;
        return out;
    }
    if (!rng.bernoulli(success_prob)) {
        out.collision = true;
        return out;
    }
    std::size_t pick = rng.uniform_index(count);
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i] && pick-- == 0) {
            out.delivered = i;
            break;
        }
    }
    return out;
}

}  // namespace aoi
