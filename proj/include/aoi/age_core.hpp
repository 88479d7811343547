#ifndef AOI_AGE_CORE_HPP_
#define AOI_AGE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoi {

class Rng;

/// One flag per source. Kept as bytes so spans over it are contiguous.
using Flags = std::vector<std::uint8_t>;

/// Raised when the slot recursions are driven with an inconsistent input,
/// e.g. a delivery reported for a source whose buffer is empty.
class SimulationIntegrityError : public std::logic_error {
public:
    explicit SimulationIntegrityError(const std::string& what) : std::logic_error(what) {}
};

/**
 * Per-source age state.
 *
 * h is the age of the freshest update held by the destination, w the age of
 * the packet waiting in the unit buffer (or of the last one generated, once
 * the buffer has been emptied by a delivery). Both are in slots.
 */
struct SourceState {
    std::int64_t h = 1;
    std::int64_t w = 0;
    bool has_packet = false;

    friend bool operator==(const SourceState&, const SourceState&) = default;
};

/// Age-gain h - w: how much the destination age would drop if the buffered
/// packet were delivered now.
inline std::int64_t age_gain(const SourceState& s) { return s.h - s.w; }

/// M sources at h = 1, w = 0 with empty buffers.
std::vector<SourceState> initial_states(std::size_t sources);

/// Draws one Bernoulli(theta) arrival per source into `arrivals`.
void draw_arrivals(Rng& rng, double theta, std::span<std::uint8_t> arrivals);

/// Start-of-slot arrivals. A fresh packet replaces whatever was buffered and
/// resets w to 0; sources without an arrival age by one slot. h is untouched.
void apply_arrivals(std::span<SourceState> states, std::span<const std::uint8_t> arrivals);

/// End-of-slot ages for the next slot: the delivered source drops to w + 1
/// and empties its buffer, all others grow by one.
/// Throws SimulationIntegrityError if the delivered source holds no packet.
void apply_deliveries(std::span<SourceState> states, std::optional<std::size_t> delivered);

/// Flag-vector form of apply_deliveries; at most one flag may be set.
void apply_deliveries(std::span<SourceState> states, std::span<const std::uint8_t> delivered);

}  // namespace aoi

#endif  // AOI_AGE_CORE_HPP_
