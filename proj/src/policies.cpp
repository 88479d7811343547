#include "aoi/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "aoi/rng.hpp"

namespace aoi {

PolicyId parse_policy(std::string_view name)
{
    if (name == "maxweight") return PolicyId::maxweight;
    if (name == "aloha") return PolicyId::aloha;
    if (name == "aat") return PolicyId::aat;
    if (name == "sat") return PolicyId::sat;
    if (name == "gsat") return PolicyId::gsat;
    if (name == "randomized") return PolicyId::randomized;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::string_view to_string(PolicyId policy)
{
    switch (policy) {
    case PolicyId::maxweight: return "maxweight";
    case PolicyId::aloha: return "aloha";
    case PolicyId::aat: return "aat";
    case PolicyId::sat: return "sat";
    case PolicyId::gsat: return "gsat";
    case PolicyId::randomized: return "randomized";
    }
    return "unknown";
}

LoadMode parse_load_mode(std::string_view name)
{
    if (name == "raw") return LoadMode::raw;
    if (name == "clamped") return LoadMode::clamped;
    throw std::invalid_argument("unknown load mode '" + std::string(name) + "'");
}

std::string_view to_string(LoadMode mode)
{
    return mode == LoadMode::raw ? "raw" : "clamped";
}

Technology parse_technology(std::string_view name)
{
    if (name == "aloha") return Technology::slotted_aloha;
    if (name == "ideal") return Technology::idealized;
    throw std::invalid_argument("unknown technology '" + std::string(name) + "'");
}

std::string_view to_string(Technology technology)
{
    return technology == Technology::slotted_aloha ? "aloha" : "ideal";
}

double aloha_load(LoadMode mode, std::int64_t sources, double theta)
{
    const double raw = static_cast<double>(sources) * theta;
    return mode == LoadMode::raw ? raw : std::min(raw, 1.0 / kE);
}

AlohaState AlohaState::initial(std::int64_t sources, double load)
{
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    return AlohaState{0.0, 1.0, load, sources};
}

AlohaState aloha_update(AlohaState state, bool collision)
{
    const double cap = static_cast<double>(state.sources);
    if (collision)
        state.n = std::min(state.n + state.load + 1.0 / (kE - 2.0), cap);
    else
        state.n = std::min(std::max(state.load, state.n + state.load - 1.0), cap);
    state.p_b = state.n > 0.0 ? std::min(1.0, 1.0 / state.n) : 1.0;
    return state;
}

void aloha_decide(std::span<const SourceState> states, const AlohaState& aloha, Rng& rng,
                  std::span<std::uint8_t> transmit)
{
    for (std::size_t i = 0; i < states.size(); ++i)
        transmit[i] = states[i].has_packet && rng.bernoulli(aloha.p_b);
}

void maxweight_select(std::span<const SourceState> states, std::span<std::uint8_t> transmit)
{
    std::fill(transmit.begin(), transmit.end(), 0);
    std::int64_t best = 0;
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].has_packet)
            continue;
        const auto gain = age_gain(states[i]);
        if (gain > best) {
            best = gain;
            pick = i;
        }
    }
    if (pick)
        transmit[*pick] = 1;
}

void sat_decide(std::span<const SourceState> states, std::int64_t threshold,
                const AlohaState& aloha, Rng& rng, std::span<std::uint8_t> transmit)
{
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        transmit[i] = s.has_packet && age_gain(s) >= threshold && rng.bernoulli(aloha.p_b);
    }
}

void gsat_active_set(std::span<const SourceState> states, std::int64_t threshold,
                     std::span<std::uint8_t> active)
{
    for (std::size_t i = 0; i < states.size(); ++i)
        active[i] = states[i].has_packet && age_gain(states[i]) >= threshold;
}

void randomized_stationary_decide(std::span<const SourceState> states, double p, Rng& rng,
                                  std::span<std::uint8_t> transmit)
{
    for (std::size_t i = 0; i < states.size(); ++i)
        transmit[i] = states[i].has_packet && rng.bernoulli(p);
}

AatEstimator::AatEstimator(std::int64_t sources, double theta, std::size_t truncation)
    : sources_(sources),
      theta_(theta),
      target_(1.0 / (kE * static_cast<double>(sources))),
      dist_(truncation ? truncation : default_truncation(sources)),
      arrivals_(dist_.size(), 0.0)
{
}

std::int64_t AatEstimator::begin_slot()
{
    propagate_in_place(dist_, arrivals_, theta_);
    threshold_ = adaptive_threshold(arrivals_, target_);
    return threshold_;
}

void AatEstimator::end_slot(bool collision)
{
    post_feedback_update_in_place(dist_, threshold_, collision, sources_);
}

namespace {

std::size_t count_eligible(std::span<const SourceState> states, std::int64_t threshold)
{
    std::size_t n = 0;
    for (const auto& s : states)
        n += s.has_packet && age_gain(s) >= threshold;
    return n;
}

class AlohaPolicy final : public Policy {
public:
    AlohaPolicy(const PolicyParams& p)
        : Policy(static_cast<std::size_t>(p.sources)),
          aloha_(AlohaState::initial(p.sources, aloha_load(p.load_mode, p.sources, p.theta)))
    {
    }

    PolicyId id() const override { return PolicyId::aloha; }

    SlotOutcome step(std::span<const SourceState> states, Rng& rng) override
    {
        active_ = count_eligible(states, 1);
        aloha_decide(states, aloha_, rng, transmit_);
        const SlotOutcome out = resolve_slot(transmit_);
        aloha_ = aloha_update(aloha_, out.collision);
        return out;
    }

private:
    AlohaState aloha_;
};

class SatPolicy final : public Policy {
public:
    SatPolicy(const PolicyParams& p, PolicyId id, std::int64_t threshold)
        : Policy(static_cast<std::size_t>(p.sources)),
          id_(id),
          threshold_(threshold),
          aloha_(AlohaState::initial(p.sources, aloha_load(p.load_mode, p.sources, p.theta)))
    {
    }

    PolicyId id() const override { return id_; }
    std::int64_t threshold() const override { return threshold_; }

    SlotOutcome step(std::span<const SourceState> states, Rng& rng) override
    {
        active_ = count_eligible(states, threshold_);
        sat_decide(states, threshold_, aloha_, rng, transmit_);
        const SlotOutcome out = resolve_slot(transmit_);
        aloha_ = aloha_update(aloha_, out.collision);
        return out;
    }

private:
    PolicyId id_;
    std::int64_t threshold_;
    AlohaState aloha_;
};

class IdealGsatPolicy final : public Policy {
public:
    IdealGsatPolicy(const PolicyParams& p)
        : Policy(static_cast<std::size_t>(p.sources)),
          capacity_(p.capacity),
          threshold_(generalized_threshold(p.sources, p.theta, p.capacity))
    {
    }

    PolicyId id() const override { return PolicyId::gsat; }
    std::int64_t threshold() const override { return threshold_; }

    SlotOutcome step(std::span<const SourceState> states, Rng& rng) override
    {
        gsat_active_set(states, threshold_, transmit_);
        active_ = static_cast<std::size_t>(std::count(transmit_.begin(), transmit_.end(), 1));
        return resolve_slot_idealized(transmit_, capacity_, rng);
    }

private:
    double capacity_;
    std::int64_t threshold_;
};

class AatPolicy final : public Policy {
public:
    AatPolicy(const PolicyParams& p)
        : Policy(static_cast<std::size_t>(p.sources)),
          estimator_(p.sources, p.theta, p.truncation),
          aloha_(AlohaState::initial(p.sources, 1.0 / kE))
    {
    }

    PolicyId id() const override { return PolicyId::aat; }
    std::int64_t threshold() const override { return estimator_.threshold(); }
    const AatEstimator& estimator() const { return estimator_; }

    SlotOutcome step(std::span<const SourceState> states, Rng& rng) override
    {
        const auto threshold = estimator_.begin_slot();
        active_ = count_eligible(states, threshold);
        sat_decide(states, threshold, aloha_, rng, transmit_);
        const SlotOutcome out = resolve_slot(transmit_);
        estimator_.end_slot(out.collision);
        aloha_ = aloha_update(aloha_, out.collision);
        return out;
    }

private:
    AatEstimator estimator_;
    AlohaState aloha_;
};

class MaxWeightPolicy final : public Policy {
public:
    explicit MaxWeightPolicy(const PolicyParams& p) : Policy(static_cast<std::size_t>(p.sources)) {}

    PolicyId id() const override { return PolicyId::maxweight; }

    SlotOutcome step(std::span<const SourceState> states, Rng&) override
    {
        maxweight_select(states, transmit_);
        active_ = count_eligible(states, 1);
        return resolve_slot(transmit_);
    }
};

class RandomizedPolicy final : public Policy {
public:
    explicit RandomizedPolicy(const PolicyParams& p)
        : Policy(static_cast<std::size_t>(p.sources)),
          prob_(p.transmit_prob.value_or(1.0 / static_cast<double>(p.sources)))
    {
        if (!(prob_ >= 0.0 && prob_ <= 1.0))
            throw std::domain_error("transmit probability must lie in [0, 1]");
    }

    PolicyId id() const override { return PolicyId::randomized; }

    SlotOutcome step(std::span<const SourceState> states, Rng& rng) override
    {
        active_ = count_eligible(states, 1);
        randomized_stationary_decide(states, prob_, rng, transmit_);
        return resolve_slot(transmit_);
    }

private:
    double prob_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicyParams& p)
{
    if (p.sources < 1)
        throw std::domain_error("source count must be at least 1");
    if (!(p.theta > 0.0 && p.theta <= 1.0))
        throw std::domain_error("arrival probability must lie in (0, 1]");

    switch (p.id) {
    case PolicyId::maxweight:
        return std::make_unique<MaxWeightPolicy>(p);
    case PolicyId::aloha:
        return std::make_unique<AlohaPolicy>(p);
    case PolicyId::aat:
        return std::make_unique<AatPolicy>(p);
    case PolicyId::sat:
        return std::make_unique<SatPolicy>(p, PolicyId::sat, fixed_threshold(p.sources, p.theta));
    case PolicyId::gsat:
        if (p.technology == Technology::slotted_aloha)
            return std::make_unique<SatPolicy>(
                p, PolicyId::gsat, generalized_threshold(p.sources, p.theta, p.capacity));
        return std::make_unique<IdealGsatPolicy>(p);
    case PolicyId::randomized:
        return std::make_unique<RandomizedPolicy>(p);
    }
    throw std::invalid_argument("unhandled policy");
}

}  // namespace aoi
