#ifndef AOI_RNG_HPP_
#define AOI_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace aoi {

/// Advances a SplitMix64 state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the independent stream used by replication `replication` of an
/// experiment seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication);

/**
 * xoshiro256** generator, seeded through SplitMix64.
 *
 * Satisfies UniformRandomBitGenerator. The simulator itself only draws
 * through the helpers below, whose output is fixed for a given seed.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next(); }
    result_type next();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// True with probability p. p >= 1 always fires, p <= 0 never does.
    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n);

private:
    std::array<std::uint64_t, 4> s_;
};

}  // namespace aoi

#endif  // AOI_RNG_HPP_
