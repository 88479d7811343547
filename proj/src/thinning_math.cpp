#include "aoi/thinning_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fp_env.hpp"

namespace aoi {

AgeGainDistribution::AgeGainDistribution(std::size_t truncation) : mass_(truncation + 1, 0.0)
{
    if (truncation < 1)
        throw std::domain_error("age-gain truncation must be at least 1");
    mass_[0] = 1.0;
}

AgeGainDistribution AgeGainDistribution::point_mass(std::size_t truncation, std::size_t order)
{
    AgeGainDistribution d(truncation);
    d.mass_[0] = 0.0;
    d.mass_[std::min(order, truncation)] = 1.0;
    return d;
}

double AgeGainDistribution::total() const
{
    return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

double AgeGainDistribution::tail(std::size_t from) const
{
    if (from >= mass_.size())
        return 0.0;
    return std::accumulate(mass_.begin() + static_cast<std::ptrdiff_t>(from), mass_.end(), 0.0);
}

double ArrivalMassVector::total() const
{
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

namespace {

// Software fallback for targets without a flush-to-zero mode.
constexpr double kNegligibleMass = 1e-300;

inline double flush(double x)
{
    if constexpr (detail::FlushSubnormals::hardware())
        return x;
    else
        return x < kNegligibleMass ? 0.0 : x;
}

// Sum of v[first..] with four independent accumulators.
double block_sum(std::span<const double> v, std::size_t first)
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = first;
    for (; i + 4 <= v.size(); i += 4) {
        acc[0] += v[i];
        acc[1] += v[i + 1];
        acc[2] += v[i + 2];
        acc[3] += v[i + 3];
    }
    for (; i < v.size(); ++i)
        acc[0] += v[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

void propagate_in_place(AgeGainDistribution& dist, std::span<double> arrivals, double theta)
{
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("arrival probability must lie in [0, 1]");
    const std::size_t n = dist.truncation();
    if (arrivals.size() != n + 1)
        throw std::invalid_argument("arrival mass vector has the wrong length");

    detail::FlushSubnormals ftz;
    const double c = 1.0 - theta;
    const double theta2 = theta * theta;
    const double c2 = c * c;
    const double c3 = c2 * c;
    const double c4 = c2 * c2;
    auto ell = dist.values();

    // s_m = sum_{j<m} ell_j c^(m-j-1) over the pre-arrival ell, i.e.
    // s_m = c s_{m-1} + ell_{m-1}. Four orders per step keep the serial
    // dependency to one multiply-add per block.
    double s = 0.0;     // s_{m-1}
    double prev = ell[0];  // pre-arrival ell_{m-1}
    arrivals[0] = 0.0;
    ell[0] = flush(c * ell[0]);
    std::size_t m = 1;
    for (; m + 4 <= n; m += 4) {
        const double x0 = prev, x1 = ell[m], x2 = ell[m + 1], x3 = ell[m + 2];
        prev = ell[m + 3];
        const double l1 = c * x0 + x1;
        const double l2 = c * l1 + x2;
        const double l3 = c * l2 + x3;
        const double s0 = c * s + x0;
        const double s1 = c2 * s + l1;
        const double s2 = c3 * s + l2;
        const double s3 = c4 * s + l3;
        s = flush(s3);
        const double a0 = theta2 * s0, a1 = theta2 * s1, a2 = theta2 * s2, a3 = theta2 * s3;
        arrivals[m] = a0;
        arrivals[m + 1] = a1;
        arrivals[m + 2] = a2;
        arrivals[m + 3] = a3;
        ell[m] = flush(c * x1 + a0);
        ell[m + 1] = flush(c * x2 + a1);
        ell[m + 2] = flush(c * x3 + a2);
        ell[m + 3] = flush(c * prev + a3);
    }
    for (; m < n; ++m) {
        s = flush(c * s + prev);
        prev = ell[m];
        const double a = theta2 * s;
        arrivals[m] = a;
        ell[m] = flush(c * ell[m] + a);
    }
    // Bucket n collects every order >= n: geometric overflow from below plus
    // the lumped nodes themselves, which stay lumped after an arrival.
    s = c * s + prev;
    const double a_tail = theta * s + theta * ell[n];
    arrivals[n] = a_tail;
    ell[n] = c * ell[n] + a_tail;
}

Propagation propagate_arrival_distribution(const AgeGainDistribution& dist, double theta)
{
    Propagation out{dist, ArrivalMassVector{std::vector<double>(dist.size(), 0.0)}};
    propagate_in_place(out.dist, out.arrivals.mass, theta);
    return out;
}

std::int64_t adaptive_threshold(std::span<const double> arrivals, double target)
{
    if (!(target > 0.0))
        throw std::domain_error("threshold target must be positive");
    // Scan downwards in blocks of eight and only walk a block order by order
    // once it is known to contain the crossing.
    constexpr std::size_t kBlock = 8;
    double tail = 0.0;
    std::size_t top = arrivals.size();  // orders [top, size) already summed
    while (top > 1) {
        const std::size_t low = top > kBlock + 1 ? top - kBlock : 1;
        double part[2] = {0.0, 0.0};
        for (std::size_t t = low; t < top; ++t)
            part[t & 1] += arrivals[t];
        if (tail + (part[0] + part[1]) >= target) {
            for (std::size_t t = top; t-- > low;) {
                tail += arrivals[t];
                if (tail >= target)
                    return static_cast<std::int64_t>(t);
            }
        }
        tail += part[0] + part[1];
        top = low;
    }
    return 1;
}

void post_feedback_update_in_place(AgeGainDistribution& dist, std::int64_t threshold,
                                   bool collision, std::int64_t sources)
{
    if (threshold < 1)
        throw std::domain_error("threshold must be at least 1");
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    if (collision)
        return;
    const auto first = static_cast<std::size_t>(threshold);
    if (first > dist.truncation())
        return;
    detail::FlushSubnormals ftz;
    auto ell = dist.values();
    const double denom = block_sum(ell, first);
    if (!(denom > 0.0))
        return;

    // Order m loses min(r_m / 2M, ell_m) with r_m = ell_m / denom, i.e. the
    // fraction min(1 / (2M denom), 1) of its own mass.
    const double fraction = std::min(1.0 / (2.0 * static_cast<double>(sources) * denom), 1.0);
    const double keep = 1.0 - fraction;
    for (std::size_t m = first; m < ell.size(); ++m)
        ell[m] *= keep;
    ell[0] += fraction * denom;
}

AgeGainDistribution post_feedback_update(const AgeGainDistribution& dist_plus,
                                         std::int64_t threshold, bool collision,
                                         std::int64_t sources)
{
    AgeGainDistribution out = dist_plus;
    post_feedback_update_in_place(out, threshold, collision, sources);
    return out;
}

std::int64_t fixed_threshold(std::int64_t sources, double theta)
{
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::domain_error("arrival probability must lie in (0, 1]");
    const double t = std::floor(kE * static_cast<double>(sources) - 1.0 / theta + 1.0);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

std::int64_t generalized_threshold(std::int64_t sources, double theta, double capacity)
{
    if (!(capacity > 0.0 && capacity <= 1.0))
        throw std::domain_error("capacity must lie in (0, 1]");
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::domain_error("arrival probability must lie in (0, 1]");
    const double t = std::floor(static_cast<double>(sources) / capacity - 1.0 / theta + 1.0);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

std::size_t default_truncation(std::int64_t sources)
{
    return 4 * static_cast<std::size_t>(std::ceil(kE * static_cast<double>(sources)));
}

ConvergenceError::ConvergenceError(std::size_t iterations, double residual)
    : std::runtime_error("stationary fixed point did not converge after "
                         + std::to_string(iterations) + " iterations (residual "
                         + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual)
{
}

StationaryPoint stationary_fixed_point(std::int64_t sources, double theta,
                                       const StationaryOptions& options)
{
    if (sources < 1)
        throw std::domain_error("source count must be at least 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::domain_error("arrival probability must lie in (0, 1]");
    const double m = static_cast<double>(sources);
    if (!(m * theta > 1.0 / kE))
        throw std::domain_error("stationary thinning needs M*theta > 1/e");
    if (!(options.damping >= 0.0 && options.damping < 1.0))
        throw std::domain_error("damping must lie in [0, 1)");

    const std::int64_t threshold = fixed_threshold(sources, theta);
    const std::size_t n = options.truncation ? options.truncation : default_truncation(sources);
    if (n < static_cast<std::size_t>(threshold))
        throw std::domain_error("truncation must be at least the stationary threshold");

    const double removal = 1.0 / (kE * m);
    const auto first = static_cast<std::size_t>(threshold);

    AgeGainDistribution current(n);
    AgeGainDistribution next(n);
    std::vector<double> arrivals(n + 1, 0.0);
    double residual = 0.0;

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        auto cur = current.values();
        auto nxt = next.values();
        std::copy(cur.begin(), cur.end(), nxt.begin());
        propagate_in_place(next, arrivals, theta);

        // Feedback-free average: a success removes 1/(eM) from the tail in
        // proportion to its mass. Mass clipped at zero is not credited to
        // order 0, so the total stays one.
        const double denom = next.tail(first);
        if (denom > 0.0) {
            double moved = 0.0;
            for (std::size_t k = first; k <= n; ++k) {
                const double removed = std::min(nxt[k] * removal / denom, nxt[k]);
                nxt[k] -= removed;
                moved += removed;
            }
            nxt[0] += moved;
        }

        residual = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double blended = options.damping * cur[k] + (1.0 - options.damping) * nxt[k];
            residual += std::abs(blended - cur[k]);
            cur[k] = blended;
        }
        if (residual < options.tolerance) {
            StationaryPoint out{current, current, ArrivalMassVector{}, threshold, it, residual};
            out.arrivals.mass.assign(n + 1, 0.0);
            propagate_in_place(out.dist_plus, out.arrivals.mass, theta);
            return out;
        }
    }
    throw ConvergenceError(options.max_iterations, residual);
}

SlotProbabilities aloha_slot_probabilities(double attempt_rate)
{
    if (!(attempt_rate >= 0.0) || !std::isfinite(attempt_rate))
        throw std::domain_error("attempt rate must be a finite non-negative number");
    SlotProbabilities p;
    p.idle = std::exp(-attempt_rate);
    p.success = attempt_rate * p.idle;
    p.collision = 1.0 - (p.success + p.idle);
    return p;
}

double lower_bound_capacity(std::optional<std::int64_t> sources, double capacity)
{
    if (!(capacity > 0.0))
        throw std::domain_error("capacity must be positive");
    double bound = 1.0 / (2.0 * capacity);
    if (sources) {
        if (*sources < 1)
            throw std::domain_error("source count must be at least 1");
        bound += 1.0 / (2.0 * static_cast<double>(*sources));
    }
    return bound;
}

double lower_bound_arrival(std::int64_t sources, double theta)
{
    const double rate = static_cast<double>(sources) * theta;
    if (!(rate > 0.0))
        throw std::domain_error("M*theta must be positive; the age is unbounded otherwise");
    return 1.0 / rate;
}

double asymptotic_naaoi(PolicyId policy, double eta_or_capacity)
{
    switch (policy) {
    case PolicyId::aloha:
        if (!(eta_or_capacity > 0.0 && eta_or_capacity <= 1.0 / kE))
            throw std::domain_error("slotted ALOHA limit needs eta in (0, 1/e]");
        return 1.0 / eta_or_capacity;
    case PolicyId::sat:
        return kE / 2.0;
    case PolicyId::gsat:
        if (!(eta_or_capacity > 0.0 && eta_or_capacity <= 1.0))
            throw std::domain_error("technology throughput must lie in (0, 1]");
        return 1.0 / (2.0 * eta_or_capacity);
    default:
        throw std::domain_error("no asymptotic NAAoI is known for policy "
                                + std::string(to_string(policy)));
    }
}

}  // namespace aoi
