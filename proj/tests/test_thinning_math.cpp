#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "aoi/rng.hpp"
#include "aoi/thinning_math.hpp"
#include "doctest.h"

namespace {

constexpr double kE = std::numbers::e;

// Direct sum a_m = theta^2 sum_{j<m} l_j (1-theta)^{m-j-1}, with orders
// reaching past N lumped into N.
std::vector<double> arrivals_by_definition(const std::vector<double>& l, double theta)
{
    const std::size_t n = l.size() - 1;
    std::vector<double> a(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        // a node of order j jumps to j + s, s >= 1 geometric
        double p = theta;
        for (std::size_t s = 1; j + s < n; ++s, p *= 1.0 - theta)
            a[j + s] += theta * p * l[j];
        const std::size_t reach = j < n ? n - j : 1;
        a[n] += theta * std::pow(1.0 - theta, static_cast<double>(reach - 1)) * l[j];
    }
    return a;
}

std::vector<double> random_distribution(aoi::Rng& rng, std::size_t size)
{
    std::vector<double> v(size);
    double sum = 0.0;
    for (auto& x : v) {
        // sparse and spiky inputs, not just smooth ones
        x = rng.bernoulli(0.3) ? 0.0 : -std::log1p(-rng.uniform());
        sum += x;
    }
    if (sum == 0.0) {
        v[0] = 1.0;
        return v;
    }
    for (auto& x : v)
        x /= sum;
    return v;
}

aoi::AgeGainDistribution make_dist(const std::vector<double>& v)
{
    aoi::AgeGainDistribution d(v.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        d[i] = v[i];
    return d;
}

}  // namespace

TEST_SUITE("thinning_math")
{
    TEST_CASE("propagation from a point mass is geometric")
    {
        aoi::AgeGainDistribution d(30);
        auto [plus, a] = aoi::propagate_arrival_distribution(d, 0.5);
        CHECK(plus[0] == doctest::Approx(0.5));
        for (std::size_t m = 1; m < 30; ++m) {
            CHECK(plus[m] == doctest::Approx(std::pow(0.5, double(m) + 1.0)));
            CHECK(a[m] == doctest::Approx(0.25 * std::pow(0.5, double(m) - 1.0)));
        }
        CHECK(a.mass[0] == 0.0);
    }

    TEST_CASE("zero arrival rate is the identity")
    {
        aoi::Rng rng(3);
        auto v = random_distribution(rng, 12);
        auto [plus, a] = aoi::propagate_arrival_distribution(make_dist(v), 0.0);
        for (std::size_t m = 0; m < v.size(); ++m) {
            CHECK(plus[m] == v[m]);
            CHECK(a[m] == 0.0);
        }
    }

    TEST_CASE("propagation matches the defining sum")
    {
        aoi::Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + rng.uniform_index(60);
            const double theta = trial % 10 == 0 ? 1.0 : rng.uniform();
            auto v = random_distribution(rng, n + 1);
            auto [plus, a] = aoi::propagate_arrival_distribution(make_dist(v), theta);
            auto ref = arrivals_by_definition(v, theta);
            for (std::size_t m = 1; m <= n; ++m) {
                REQUIRE(a[m] == doctest::Approx(ref[m]).epsilon(1e-9).scale(1.0));
                const double expect = (1.0 - theta) * v[m] + ref[m];
                REQUIRE(plus[m] == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
            }
        }
    }

    TEST_CASE("mass conservation over random inputs")
    {
        aoi::Rng rng(2718);
        for (int trial = 0; trial < 10000; ++trial) {
            const std::size_t n = 1 + rng.uniform_index(300);
            const double theta = rng.uniform();
            auto v = random_distribution(rng, n + 1);
            auto [plus, a] = aoi::propagate_arrival_distribution(make_dist(v), theta);
            REQUIRE(std::abs(plus.total() - 1.0) < 1e-9);
            REQUIRE(a.total() <= theta + 1e-9);
            REQUIRE(std::abs(a.total() - theta) < 1e-9);
            for (double x : plus.values())
                REQUIRE(x >= 0.0);
        }
    }

    TEST_CASE("adaptive threshold")
    {
        const double target = 0.01;
        std::vector<double> a{0.0, target, target, target, 0.0, 0.0};
        CHECK(aoi::adaptive_threshold(a, target) == 3);

        std::vector<double> b{0.0, 1.0, 0.0, 0.0};
        CHECK(aoi::adaptive_threshold(b, 0.5) == 1);

        std::vector<double> z(40, 0.0);
        CHECK(aoi::adaptive_threshold(z, 0.1) == 1);

        CHECK_THROWS_AS(aoi::adaptive_threshold(b, 0.0), std::domain_error);
    }

    TEST_CASE("adaptive threshold agrees with a linear scan")
    {
        aoi::Rng rng(31);
        for (int trial = 0; trial < 2000; ++trial) {
            const std::size_t n = 1 + rng.uniform_index(100);
            auto v = random_distribution(rng, n + 1);
            v[0] = 0.0;
            const double target = rng.uniform() * 0.5 + 1e-6;
            std::int64_t expect = 1;
            double tail = 0.0;
            for (std::size_t t = n; t >= 1; --t) {
                tail += v[t];
                if (tail >= target) {
                    expect = static_cast<std::int64_t>(t);
                    break;
                }
            }
            REQUIRE(aoi::adaptive_threshold(v, target) == expect);
        }
    }

    TEST_CASE("post-feedback update")
    {
        aoi::Rng rng(13);
        auto v = random_distribution(rng, 21);
        auto d = make_dist(v);
        auto same = aoi::post_feedback_update(d, 5, true, 10);
        for (std::size_t m = 0; m < v.size(); ++m)
            CHECK(same[m] == v[m]);

        // single order above the threshold
        const std::int64_t M = 50;
        aoi::AgeGainDistribution one(10);
        one[0] = 0.9;
        one[4] = 0.1;
        auto out = aoi::post_feedback_update(one, 4, false, M);
        CHECK(out[4] == doctest::Approx(0.1 - 1.0 / (2.0 * M)));
        CHECK(out[0] == doctest::Approx(0.9 + 1.0 / (2.0 * M)));

        // nothing above the threshold
        aoi::AgeGainDistribution low(10);
        low[0] = 0.5;
        low[2] = 0.5;
        out = aoi::post_feedback_update(low, 3, false, M);
        CHECK(out[0] == 0.5);
        CHECK(out[2] == 0.5);

        // tail smaller than the removal: clipped at zero, mass kept
        aoi::AgeGainDistribution thin(10);
        thin[0] = 1.0 - 1e-4;
        thin[7] = 1e-4;
        out = aoi::post_feedback_update(thin, 5, false, M);
        CHECK(out[7] == 0.0);
        CHECK(out.total() == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("post-feedback update against the per-order rule")
    {
        aoi::Rng rng(41);
        for (int trial = 0; trial < 2000; ++trial) {
            const std::size_t n = 2 + rng.uniform_index(80);
            auto v = random_distribution(rng, n + 1);
            const auto T = static_cast<std::int64_t>(1 + rng.uniform_index(n));
            const std::int64_t M = 1 + static_cast<std::int64_t>(rng.uniform_index(600));
            auto out = aoi::post_feedback_update(make_dist(v), T, false, M);

            double denom = 0.0;
            for (std::size_t m = T; m <= n; ++m)
                denom += v[m];
            std::vector<double> ref = v;
            for (std::size_t m = T; m <= n; ++m) {
                if (denom == 0.0)
                    break;
                const double removed = std::min(v[m] / denom / (2.0 * M), v[m]);
                ref[m] -= removed;
                ref[0] += removed;
            }
            for (std::size_t m = 0; m <= n; ++m)
                REQUIRE(out[m] == doctest::Approx(ref[m]).epsilon(1e-10).scale(1.0));
            REQUIRE(std::abs(out.total() - 1.0) < 1e-9);
        }
    }

    TEST_CASE("fixed thresholds")
    {
        CHECK(aoi::fixed_threshold(500, 1.0) == 1359);
        CHECK(aoi::fixed_threshold(100, 0.01) == 172);
        CHECK(aoi::fixed_threshold(10, 0.01) == 1);
        CHECK(aoi::generalized_threshold(500, 1.0, 1.0) == 500);
        CHECK(aoi::generalized_threshold(500, 1.0, 1.0 / kE) == 1359);
        CHECK(aoi::generalized_threshold(500, 0.002, 1.0) == 1);
        CHECK_THROWS(aoi::fixed_threshold(0, 0.5));
        CHECK_THROWS(aoi::fixed_threshold(10, 0.0));
        CHECK_THROWS(aoi::generalized_threshold(10, 0.5, 1.5));
    }

    TEST_CASE("generalized threshold reduces to the fixed one at C = 1/e")
    {
        for (std::int64_t M : {1, 2, 3, 5, 10, 20, 50, 100, 500, 1000})
            for (double theta : {0.001, 0.002, 0.01, 0.05, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0})
                CHECK(aoi::generalized_threshold(M, theta, 1.0 / kE) ==
                      aoi::fixed_threshold(M, theta));
    }

    TEST_CASE("stationary fixed point satisfies the closed forms")
    {
        for (std::int64_t M : {50, 100, 500}) {
            for (double theta : {0.1, 0.5, 1.0}) {
                CAPTURE(M);
                CAPTURE(theta);
                auto fp = aoi::stationary_fixed_point(M, theta);
                const auto T = aoi::fixed_threshold(M, theta);
                const double unit = 1.0 / (kE * static_cast<double>(M));
                CHECK(fp.threshold == T);
                CHECK(std::abs(fp.dist[0] - unit / theta) < 1e-6);
                for (std::int64_t m = 1; m <= T - 1; ++m) {
                    REQUIRE(std::abs(fp.dist[m] - unit) < 1e-6);
                    REQUIRE(std::abs(fp.dist_plus[m] - unit) < 1e-6);
                }
                for (std::int64_t m = 1; m <= T; ++m)
                    REQUIRE(std::abs(fp.arrivals[m] - theta * unit) < 1e-6);
                CHECK(std::abs(fp.arrivals.total() - theta) < 1e-6);
                CHECK(std::abs(fp.dist.total() - 1.0) < 1e-9);
                // the adaptive rule applied to the fixed point recovers T*
                CHECK(aoi::adaptive_threshold(fp.arrivals, unit) == T);
            }
        }
    }

    TEST_CASE("stationary fixed point errors")
    {
        CHECK_THROWS_AS(aoi::stationary_fixed_point(10, 0.01), std::domain_error);
        aoi::StationaryOptions small;
        small.truncation = 10;
        CHECK_THROWS_AS(aoi::stationary_fixed_point(500, 1.0, small), std::domain_error);
        aoi::StationaryOptions hurried;
        hurried.max_iterations = 3;
        try {
            aoi::stationary_fixed_point(100, 0.5, hurried);
            FAIL("expected non-convergence");
        } catch (const aoi::ConvergenceError& e) {
            CHECK(e.iterations() == 3);
            CHECK(e.residual() > 0.0);
        }
    }

    TEST_CASE("slot probabilities")
    {
        auto p = aoi::aloha_slot_probabilities(1.0);
        CHECK(p.success == doctest::Approx(0.367879).epsilon(1e-6));
        CHECK(p.idle == doctest::Approx(0.367879).epsilon(1e-6));
        CHECK(p.collision == doctest::Approx(0.264241).epsilon(1e-6));

        p = aoi::aloha_slot_probabilities(0.0);
        CHECK(p.success == 0.0);
        CHECK(p.idle == 1.0);
        CHECK(p.collision == 0.0);

        p = aoi::aloha_slot_probabilities(0.5);
        CHECK(p.success == doctest::Approx(0.303265).epsilon(1e-6));
        CHECK(p.idle == doctest::Approx(0.606531).epsilon(1e-6));
        CHECK(p.collision == doctest::Approx(0.090204).epsilon(1e-5));

        for (double g : {0.01, 0.3, 1.0, 2.5, 40.0}) {
            p = aoi::aloha_slot_probabilities(g);
            CHECK(p.success + p.idle + p.collision == 1.0);
        }
        CHECK_THROWS(aoi::aloha_slot_probabilities(-1.0));
    }

    TEST_CASE("lower bounds")
    {
        CHECK(aoi::lower_bound_capacity(std::nullopt, 0.568) == doctest::Approx(0.880).epsilon(1e-3));
        CHECK(aoi::lower_bound_capacity(500, 1.0) == doctest::Approx(0.501));
        CHECK(aoi::lower_bound_capacity(1, 1.0) == 1.0);
        CHECK(aoi::lower_bound_arrival(500, 0.002) == doctest::Approx(1.0));
        CHECK(aoi::lower_bound_arrival(500, 0.00049051) == doctest::Approx(4.0774).epsilon(1e-4));
        CHECK(aoi::lower_bound_arrival(1, 1.0) == 1.0);
        CHECK_THROWS(aoi::lower_bound_capacity(500, 0.0));
        CHECK_THROWS(aoi::lower_bound_arrival(500, 0.0));
    }

    TEST_CASE("asymptotic NAAoI")
    {
        CHECK(aoi::asymptotic_naaoi(aoi::PolicyId::aloha, 0.25) == doctest::Approx(4.0));
        CHECK(aoi::asymptotic_naaoi(aoi::PolicyId::sat, 0.0) == doctest::Approx(1.359141));
        CHECK(aoi::asymptotic_naaoi(aoi::PolicyId::gsat, 1.0) == doctest::Approx(0.5));
        CHECK_THROWS(aoi::asymptotic_naaoi(aoi::PolicyId::aloha, 0.5));
        CHECK_THROWS(aoi::asymptotic_naaoi(aoi::PolicyId::maxweight, 1.0));
    }

    TEST_CASE("distribution basics")
    {
        CHECK_THROWS(aoi::AgeGainDistribution(0));
        auto d = aoi::AgeGainDistribution::point_mass(8, 3);
        CHECK(d[3] == 1.0);
        CHECK(d.tail(3) == 1.0);
        CHECK(d.tail(4) == 0.0);
        CHECK(d.truncation() == 8);
        CHECK(aoi::default_truncation(500) == 4 * 1360);
    }
}
