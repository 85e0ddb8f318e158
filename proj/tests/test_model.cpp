#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "ew/errors.hpp"
#include "ew/model.hpp"

using namespace ew;

namespace {
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
}  // namespace

TEST_CASE("rate_of basics") {
    CHECK(rate_of(0.0, 5.0) == 0.0);
    CHECK(rate_of(1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(rate_of(3.0, 1.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(rate_of(-1.0, 1.0), Error);
    CHECK_THROWS_AS(rate_of(1.0, 0.0), Error);
    CHECK_THROWS_AS(rate_of(1.0, -2.0), Error);
}

TEST_CASE("rate_of monotone and concave in power") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const double s = 0.1 + 10.0 * unit(rng);
        const double a = 5.0 * unit(rng);
        const double b = a + 0.1 + 5.0 * unit(rng);
        CHECK(rate_of(b, s) > rate_of(a, s));
        const double mid = rate_of(0.5 * (a + b), s);
        CHECK(mid >= 0.5 * (rate_of(a, s) + rate_of(b, s)) - 1e-12);
    }
}

TEST_CASE("slaq_utility examples") {
    const std::vector<double> v{3.0, 1.0, 2.0};
    CHECK(slaq_utility(v, 2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(slaq_utility(v, 3) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(slaq_utility(v, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(slaq_utility(v, 0), Error);
    CHECK_THROWS_AS(slaq_utility(v, 4), Error);
    CHECK_THROWS_AS(slaq_utility(std::vector<double>{}, 1), Error);
}

TEST_CASE("slaq_utility permutation invariance") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(3 + std::size_t(rng() % 30));
        for (double& x : v) x = 10.0 * unit(rng);
        std::vector<double> shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const std::size_t k = 1 + std::size_t(rng() % v.size());
        const double a = slaq_utility(v, k);
        const double b = slaq_utility(shuffled, k);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("slaq_utility concave in the rate vector") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + std::size_t(rng() % 10);
        std::vector<double> x(n), y(n), mid(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 5.0 * unit(rng);
            y[i] = 5.0 * unit(rng);
            mid[i] = 0.5 * (x[i] + y[i]);
        }
        const std::size_t k = 1 + std::size_t(rng() % n);
        CHECK(slaq_utility(mid, k) >=
              0.5 * (slaq_utility(x, k) + slaq_utility(y, k)) - 1e-12);
    }
}

TEST_CASE("cvar_lower_reward examples") {
    const std::vector<double> z{1.0, 2.0, 3.0, 4.0};
    CHECK(cvar_lower_reward(z, 0.5) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(cvar_lower_reward(z, 1.0) == doctest::Approx(2.5).epsilon(1e-13));
    const std::vector<double> w{0.7, 0.3, 0.5, 0.9};
    CHECK(cvar_lower_reward(w, 0.25) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK_THROWS_AS(cvar_lower_reward(z, 0.3), Error);  // 0.3*4 not integral
    CHECK_THROWS_AS(cvar_lower_reward(z, 0.0), Error);
    CHECK_THROWS_AS(cvar_lower_reward(z, 1.5), Error);
}

TEST_CASE("cvar matches slaq at lattice levels") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + std::size_t(rng() % 20);
        std::vector<double> z(n);
        for (double& x : z) x = 6.0 * unit(rng);
        for (std::size_t k = 1; k <= n; ++k) {
            const double alpha_bar = double(k) / double(n);
            const double lhs = double(k) * cvar_lower_reward(z, alpha_bar);
            const double rhs = slaq_utility(z, k);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("quantile_count rounding") {
    CHECK(quantile_count(0.5, 4) == 2);
    CHECK(quantile_count(0.75, 100) == 75);
    CHECK(quantile_count(1.0, 7) == 7);
    CHECK(quantile_count(0.7, 10) == 7);        // 0.7*10 is 6.999... in fp
    CHECK(quantile_count(1.0 / 3.0, 3) == 1);   // snaps to 1, not ceil to 2
    CHECK(quantile_count(0.337, 1000) == 337);
    CHECK(quantile_count(0.301, 10) == 4);      // genuinely fractional: ceil
    CHECK(quantile_count(0.01, 5) == 1);        // never below 1
    CHECK_THROWS_AS(quantile_count(0.0, 5), Error);
    CHECK_THROWS_AS(quantile_count(1.1, 5), Error);
    CHECK_THROWS_AS(quantile_count(0.5, 0), Error);
}

TEST_CASE("empirical distribution queries") {
    const std::vector<double> v{1.0, 3.0};
    EmpiricalNoiseDistribution d(v);
    CHECK(d.cdf(2.0) == doctest::Approx(0.5));
    CHECK(d.cdf(3.0) == doctest::Approx(1.0));
    CHECK(d.cdf(0.5) == 0.0);
    CHECK(d.truncated_mean(2.0) == doctest::Approx(0.5));
    CHECK(d.truncated_mean(10.0) == doctest::Approx(2.0));
    CHECK(d.truncated_mean(0.0) == 0.0);
    CHECK(d.mean() == doctest::Approx(2.0));
    CHECK(d.min_value() == 1.0);
    CHECK(d.max_value() == 3.0);
    CHECK(empirical_cdf(d, 2.0) == d.cdf(2.0));
    CHECK(truncated_mean(d, 2.0) == d.truncated_mean(2.0));
}

TEST_CASE("empirical distribution with ties") {
    const std::vector<double> v{2.0, 1.0, 2.0, 5.0, 2.0};
    EmpiricalNoiseDistribution d(v);
    CHECK(d.support() == std::vector<double>{1.0, 2.0, 5.0});
    CHECK(d.count_le(2.0) == 4);
    CHECK(d.count_lt(2.0) == 1);
    CHECK(d.sum_le(2.0) == doctest::Approx(7.0));
    CHECK(d.sum_lt(2.0) == doctest::Approx(1.0));
    CHECK(d.log_sum_le(2.0) == doctest::Approx(3.0 * std::log(2.0)));
    CHECK(d.cdf(1.99) == doctest::Approx(0.2));
    CHECK_THROWS_AS(EmpiricalNoiseDistribution(std::vector<double>{}), Error);
    CHECK_THROWS_AS(EmpiricalNoiseDistribution(std::vector<double>{1.0, -1.0}), Error);
}

TEST_CASE("empirical distribution monotone properties") {
    std::mt19937_64 rng(23);
    std::vector<double> v(64);
    for (double& x : v) x = 0.2 + 12.0 * unit(rng);
    EmpiricalNoiseDistribution d(v);
    double prev_cdf = -1.0, prev_tm = -1.0;
    for (double x = 0.0; x <= 13.0; x += 0.13) {
        CHECK(d.cdf(x) >= prev_cdf);
        CHECK(d.truncated_mean(x) >= prev_tm);
        CHECK(d.truncated_mean(x) <= d.mean() + 1e-15);
        prev_cdf = d.cdf(x);
        prev_tm = d.truncated_mean(x);
    }
    CHECK(d.cdf(d.max_value()) == 1.0);
    CHECK(d.truncated_mean(d.max_value()) == doctest::Approx(d.mean()));
}

TEST_CASE("scenario validation and n_alpha") {
    const Scenario sc({1.0, 3.0, 7.0}, 6.0, 0.5);
    CHECK(sc.n_terminals() == 3);
    CHECK(sc.n_alpha() == 2);
    CHECK(sc.avg_power_budget() == doctest::Approx(2.0));
    CHECK_THROWS_AS(Scenario({}, 1.0, 0.5), Error);
    CHECK_THROWS_AS(Scenario({1.0, 0.0}, 1.0, 0.5), Error);
    CHECK_THROWS_AS(Scenario({1.0}, 0.0, 0.5), Error);
    CHECK_THROWS_AS(Scenario({1.0}, 1.0, 0.0), Error);
    CHECK_THROWS_AS(Scenario({1.0}, 1.0, 1.5), Error);
}

TEST_CASE("allocation derives rates from powers") {
    const std::vector<double> noise{1.0, 3.0};
    const Allocation a = Allocation::from_powers({3.0, 1.0}, noise);
    CHECK(a.rates[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(a.rates[1] == doctest::Approx(std::log1p(1.0 / 3.0)).epsilon(1e-12));
    CHECK(a.sum_power() == doctest::Approx(4.0));
    CHECK(a.min_rate() == doctest::Approx(std::log1p(1.0 / 3.0)));
    CHECK_THROWS_AS(Allocation::from_powers({1.0}, noise), Error);
}
