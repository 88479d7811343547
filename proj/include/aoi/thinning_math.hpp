#ifndef AOI_THINNING_MATH_HPP_
#define AOI_THINNING_MATH_HPP_

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/policy_id.hpp"

namespace aoi {

inline constexpr double kE = std::numbers::e;

/// Throughput of the best known collision-resolution protocols on the
/// collision channel; the capacity used for the decentralized lower bound.
inline constexpr double kCollisionChannelCapacity = 0.568;

/**
 * Fraction of sources at each age-gain order m = 0..N.
 *
 * Support is truncated at N; bucket N holds all mass at orders >= N.
 */
class AgeGainDistribution {
public:
    /// Point mass at order 0 with truncation N (N >= 1).
    explicit AgeGainDistribution(std::size_t truncation);

    static AgeGainDistribution point_mass(std::size_t truncation, std::size_t order);

    std::size_t truncation() const { return mass_.size() - 1; }
    std::size_t size() const { return mass_.size(); }

    double operator[](std::size_t m) const { return mass_[m]; }
    double& operator[](std::size_t m) { return mass_[m]; }

    std::span<const double> values() const { return mass_; }
    std::span<double> values() { return mass_; }

    double total() const;
    /// Mass at orders >= from.
    double tail(std::size_t from) const;

private:
    std::vector<double> mass_;
};

/// Fraction of sources that have just become m-order, for m = 1..N.
/// Index 0 is unused and kept at zero so indices match orders.
struct ArrivalMassVector {
    std::vector<double> mass;

    double operator[](std::size_t m) const { return mass[m]; }
    double total() const;
};

struct Propagation {
    AgeGainDistribution dist;
    ArrivalMassVector arrivals;
};

/// Expected age-gain distribution just after the arrivals of a slot, and the
/// mass that moved into each order, given the distribution at the end of the
/// previous slot. Source ages are taken as geometric with parameter theta.
Propagation propagate_arrival_distribution(const AgeGainDistribution& dist, double theta);

/// In-place form used once per slot by the adaptive policy. `arrivals` must
/// have dist.size() entries.
void propagate_in_place(AgeGainDistribution& dist, std::span<double> arrivals, double theta);

/// Largest t in [1, N] whose arrival tail sum reaches `target`; 1 when none does.
std::int64_t adaptive_threshold(std::span<const double> arrivals, double target);
inline std::int64_t adaptive_threshold(const ArrivalMassVector& a, double target)
{
    return adaptive_threshold(std::span<const double>(a.mass), target);
}

/// Post-feedback estimate. A collision leaves the estimate unchanged; an idle
/// or successful slot moves an expected half delivery (1/(2M) of the mass)
/// from orders >= threshold to order 0, in proportion to their mass.
AgeGainDistribution post_feedback_update(const AgeGainDistribution& dist_plus,
                                         std::int64_t threshold, bool collision,
                                         std::int64_t sources);
void post_feedback_update_in_place(AgeGainDistribution& dist, std::int64_t threshold,
                                   bool collision, std::int64_t sources);

/// Stationary threshold max(1, floor(eM - 1/theta + 1)).
std::int64_t fixed_threshold(std::int64_t sources, double theta);

/// Stationary threshold for a technology of sum throughput C:
/// max(1, floor(M/C - 1/theta + 1)).
std::int64_t generalized_threshold(std::int64_t sources, double theta, double capacity);

/// Default truncation 4 * ceil(eM).
std::size_t default_truncation(std::int64_t sources);

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::size_t iterations, double residual);
    std::size_t iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

struct StationaryOptions {
    std::size_t truncation = 0;  ///< 0 selects default_truncation(M)
    double tolerance = 1e-10;    ///< L1 distance between successive iterates
    std::size_t max_iterations = 1'000'000;
    double damping = 0.5;        ///< weight kept on the previous iterate
};

struct StationaryPoint {
    AgeGainDistribution dist;      ///< end-of-slot distribution
    AgeGainDistribution dist_plus; ///< distribution just after arrivals
    ArrivalMassVector arrivals;
    std::int64_t threshold = 1;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Fixed point of arrivals followed by the feedback-free update that removes
/// 1/(eM) of mass per slot from orders >= T*. Requires M*theta > 1/e.
StationaryPoint stationary_fixed_point(std::int64_t sources, double theta,
                                       const StationaryOptions& options = {});

struct SlotProbabilities {
    double success = 0.0;
    double idle = 0.0;
    double collision = 0.0;
};

/// Large-M slot probabilities for attempt rate G.
SlotProbabilities aloha_slot_probabilities(double attempt_rate);

/// 1/(2C) + 1/(2M); std::nullopt for M stands for M -> infinity.
double lower_bound_capacity(std::optional<std::int64_t> sources, double capacity);

/// 1/(M theta).
double lower_bound_arrival(std::int64_t sources, double theta);

/// Large-M NAAoI limit. For aloha the argument is eta = lim M theta, for gsat
/// it is the technology throughput C, and it is ignored for sat.
/// Policies without a known limit throw std::domain_error.
double asymptotic_naaoi(PolicyId policy, double eta_or_capacity);

}  // namespace aoi

#endif  // AOI_THINNING_MATH_HPP_
