#ifndef AOI_POLICIES_HPP_
#define AOI_POLICIES_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aoi/age_core.hpp"
#include "aoi/channel.hpp"
#include "aoi/policy_id.hpp"
#include "aoi/thinning_math.hpp"

namespace aoi {

class Rng;

/// Expected-arrival term fed to the backlog estimator: M*theta as is, or
/// capped at the ALOHA capacity 1/e.
enum class LoadMode { raw, clamped };

/// Channel access used once GSAT has formed its active set.
enum class Technology { slotted_aloha, idealized };

LoadMode parse_load_mode(std::string_view name);
std::string_view to_string(LoadMode mode);
Technology parse_technology(std::string_view name);
std::string_view to_string(Technology technology);

double aloha_load(LoadMode mode, std::int64_t sources, double theta);

/**
 * Pseudo-Bayesian backlog estimate driving stabilized slotted ALOHA.
 *
 * n is clamped to [0, M]; p_b = min(1, 1/n) with p_b = 1 when n = 0.
 */
struct AlohaState {
    double n = 0.0;
    double p_b = 1.0;
    double load = 0.0;
    std::int64_t sources = 1;

    static AlohaState initial(std::int64_t sources, double load);
};

/// Backlog update after a slot's collision feedback.
AlohaState aloha_update(AlohaState state, bool collision);

/// Every non-empty source transmits independently with probability p_b.
void aloha_decide(std::span<const SourceState> states, const AlohaState& aloha, Rng& rng,
                  std::span<std::uint8_t> transmit);

/// Centralized Max-Weight: schedule the non-empty source with the largest
/// age-gain, lowest index on ties, nobody when the best gain is zero.
void maxweight_select(std::span<const SourceState> states, std::span<std::uint8_t> transmit);

/// Stationary thinning: only non-empty sources with age-gain >= threshold
/// contend, each with probability p_b.
void sat_decide(std::span<const SourceState> states, std::int64_t threshold,
                const AlohaState& aloha, Rng& rng, std::span<std::uint8_t> transmit);

/// Non-empty sources with age-gain >= threshold.
void gsat_active_set(std::span<const SourceState> states, std::int64_t threshold,
                     std::span<std::uint8_t> active);

/// Every non-empty source transmits with the fixed probability p.
void randomized_stationary_decide(std::span<const SourceState> states, double p, Rng& rng,
                                  std::span<std::uint8_t> transmit);

/// Shared node-distribution estimate of the adaptive thinning policy.
class AatEstimator {
public:
    AatEstimator(std::int64_t sources, double theta, std::size_t truncation);

    /// Arrival propagation and threshold selection for the coming slot.
    std::int64_t begin_slot();
    /// Folds the slot's collision feedback into the estimate.
    void end_slot(bool collision);

    std::int64_t threshold() const { return threshold_; }
    const AgeGainDistribution& distribution() const { return dist_; }
    std::span<const double> arrivals() const { return arrivals_; }

private:
    std::int64_t sources_;
    double theta_;
    double target_;
    AgeGainDistribution dist_;
    std::vector<double> arrivals_;
    std::int64_t threshold_ = 1;
};

struct PolicyParams {
    PolicyId id = PolicyId::sat;
    std::int64_t sources = 1;
    double theta = 1.0;
    LoadMode load_mode = LoadMode::clamped;
    double capacity = 1.0;
    Technology technology = Technology::idealized;
    std::optional<double> transmit_prob;  ///< randomized only; default 1/M
    std::size_t truncation = 0;           ///< aat only; 0 selects default_truncation(M)
};

/**
 * A transmission policy together with the channel it transmits on.
 *
 * step() decides who transmits in the current slot, resolves the slot and
 * absorbs the resulting feedback, so the next call sees updated state.
 */
class Policy {
public:
    virtual ~Policy() = default;

    virtual PolicyId id() const = 0;
    virtual SlotOutcome step(std::span<const SourceState> states, Rng& rng) = 0;

    /// Threshold in force during the last step; 0 for policies without one.
    virtual std::int64_t threshold() const { return 0; }
    /// Sources eligible to contend in the last step.
    std::size_t last_active() const { return active_; }
    /// Transmission flags of the last step.
    std::span<const std::uint8_t> last_transmit() const { return transmit_; }

protected:
    explicit Policy(std::size_t sources) : transmit_(sources, 0) {}

    Flags transmit_;
    std::size_t active_ = 0;
};

std::unique_ptr<Policy> make_policy(const PolicyParams& params);

}  // namespace aoi

#endif  // AOI_POLICIES_HPP_
