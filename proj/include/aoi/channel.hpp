#ifndef AOI_CHANNEL_HPP_
#define AOI_CHANNEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace aoi {

class Rng;

/// Channel feedback for one slot. At most one source can be delivered, so
/// the delivery vector is stored as the index of that source.
struct SlotOutcome {
    std::optional<std::size_t> delivered;
    bool collision = false;
    bool idle = false;

    bool delivered_to(std::size_t source) const { return delivered && *delivered == source; }
    bool success() const { return delivered.has_value(); }
};

/// Collision channel: a lone transmitter is delivered, two or more collide,
/// nobody transmitting leaves the slot idle.
SlotOutcome resolve_slot(std::span<const std::uint8_t> transmit);

/// Abstract random-access technology of sum throughput `success_prob`.
/// With probability success_prob one active source, chosen uniformly, is
/// delivered; otherwise the slot is lost and reported as a collision.
SlotOutcome resolve_slot_idealized(std::span<const std::uint8_t> active, double success_prob,
                                   Rng& rng);

}  // namespace aoi

#endif  // AOI_CHANNEL_HPP_
