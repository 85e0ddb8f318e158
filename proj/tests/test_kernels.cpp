#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ew/kernels.hpp"
#include "ew/solver.hpp"

using namespace ew;

namespace {

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::vector<double> random_noise(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = 0.05 + 12.0 * unit(rng);
    return v;
}

struct KernelGuard {
    ~KernelGuard() { kernels::select("auto"); }
};

}  // namespace

TEST_CASE("scalar policy kernels match the closed form") {
    std::mt19937_64 rng(31);
    const auto& k = kernels::scalar();
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = std::size_t(rng() % 70);
        const auto s = random_noise(rng, n);
        const double mu = 0.02 + 2.0 * unit(rng);
        const double alpha = 0.05 + 0.95 * unit(rng);
        const double t = 3.0 * unit(rng);
        const double c = 1.0 / (mu * alpha);
        const double m = std::expm1(t);

        std::vector<double> p(n);
        k.policy_eval(s.data(), n, c, m, p.data());
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(p[i] == optimal_policy(s[i], mu, t, alpha));
            direct += p[i];
        }
        CHECK(k.policy_sum(s.data(), n, c, m) ==
              doctest::Approx(direct).epsilon(1e-14));
        CHECK(k.sum(p.data(), n) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("kernel selection round trip") {
    KernelGuard guard;
    CHECK(kernels::select("scalar"));
    CHECK(kernels::active_name() == "scalar");
    CHECK(kernels::select("auto"));
    if (kernels::cpu_has_avx2())
        CHECK(kernels::active_name() == "avx2");
    else
        CHECK(kernels::active_name() == "scalar");
    CHECK_FALSE(kernels::select("bogus"));
    CHECK(kernels::select("avx2") == kernels::cpu_has_avx2());
}

TEST_CASE("avx2 variant agrees with scalar reference") {
    if (!kernels::cpu_has_avx2()) return;  // nothing to compare on this machine
    KernelGuard guard;
    REQUIRE(kernels::select("avx2"));
    const auto& vec = kernels::active();
    const auto& ref = kernels::scalar();

    std::mt19937_64 rng(37);
    for (std::size_t n = 0; n <= 67; ++n) {
        const auto s = random_noise(rng, n);
        const double mu = 0.02 + 2.0 * unit(rng);
        const double alpha = 0.05 + 0.95 * unit(rng);
        const double t = 3.0 * unit(rng);
        const double c = 1.0 / (mu * alpha);
        const double m = std::expm1(t);

        // Elementwise evaluation must be bit-identical across variants.
        std::vector<double> pv(n, -1.0), pr(n, -2.0);
        vec.policy_eval(s.data(), n, c, m, pv.data());
        ref.policy_eval(s.data(), n, c, m, pr.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(pv[i] == pr[i]);

        // Reductions may reassociate; they agree to rounding error.
        const double sv = vec.policy_sum(s.data(), n, c, m);
        const double sr = ref.policy_sum(s.data(), n, c, m);
        CHECK(std::abs(sv - sr) <= 1e-12 * std::max(1.0, std::abs(sr)));
        const double tv = vec.sum(s.data(), n);
        const double tr = ref.sum(s.data(), n);
        CHECK(std::abs(tv - tr) <= 1e-12 * std::max(1.0, std::abs(tr)));

        // Each variant is bit-stable across repeated calls.
        CHECK(vec.policy_sum(s.data(), n, c, m) == sv);
        CHECK(ref.policy_sum(s.data(), n, c, m) == sr);
    }
}

TEST_CASE("prefix-sum policy mean agrees with the kernel route") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + std::size_t(rng() % 100);
        auto s = random_noise(rng, n);
        // Insert deliberate ties so band boundaries land on repeated values.
        if (n >= 4) {
            s[1] = s[0];
            s[3] = s[2];
        }
        const Scenario sc(s, 1.0 + 10.0 * unit(rng), 0.05 + 0.95 * unit(rng));
        const EmpiricalNoiseDistribution dist(s);
        const double mu = 0.02 + 2.0 * unit(rng);
        const double t = 3.0 * unit(rng);
        const double alpha = sc.confidence();

        const double via_prefix = policy_mean_prefix(dist, mu, t, alpha);
        const double via_kernel =
            kernels::active().policy_sum(s.data(), n, 1.0 / (mu * alpha),
                                         std::expm1(t)) /
            double(n);
        CHECK(std::abs(via_prefix - via_kernel) <=
              1e-12 * std::max(1.0, std::abs(via_kernel)));

        const double g = dual_subgradient(sc, mu, t);
        CHECK(std::abs(g - (sc.avg_power_budget() - via_kernel)) <= 1e-12);
    }
}
