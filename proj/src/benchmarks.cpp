#include "ew/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ew/errors.hpp"

namespace ew {

double waterfilling_level(const Scenario& scenario) {
    std::vector<double> s = scenario.noise_variances();
    std::sort(s.begin(), s.end());
    const double budget = scenario.total_power_budget();
    // Walk the candidate active-set sizes; the first k whose level fits under
    // the next variance is the answer.  w(k) > s[k-1] holds by induction, so
    // no separate lower check is needed.
    double prefix = 0.0;
    for (std::size_t k = 1; k <= s.size(); ++k) {
        prefix += s[k - 1];
        const double level = (budget + prefix) / double(k);
        if (k == s.size() || level <= s[k]) return level;
    }
    fail(ErrorCategory::numerical, "waterfilling: no consistent active set");
}

Allocation classical_waterfilling(const Scenario& scenario) {
    const double level = waterfilling_level(scenario);
    const auto& noise = scenario.noise_variances();
    std::vector<double> powers(noise.size());
    for (std::size_t i = 0; i < noise.size(); ++i)
        powers[i] = std::max(level - noise[i], 0.0);
    return Allocation::from_powers(std::move(powers), noise);
}

namespace {

// Marginal log-rate value d/dp log(rate(p)); strictly decreasing in p, with a
// pole at p = 0, so every terminal keeps strictly positive power at the
// proportional-fairness optimum.
inline double marginal(double p, double s) {
    return 1.0 / ((s + p) * std::log1p(p / s));
}

constexpr double kPowerFloor = 1e-12;

double power_at(double lambda, double s, double p_max) {
    if (marginal(p_max, s) >= lambda) return p_max;
    if (marginal(kPowerFloor, s) <= lambda) return kPowerFloor;
    double lo = kPowerFloor, hi = p_max;
    for (int it = 0; it < 110; ++it) {
        const double mid = 0.5 * (lo + hi);
        (marginal(mid, s) > lambda ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Allocation proportional_fairness(const Scenario& scenario, double tol) {
    require(tol > 0.0 && std::isfinite(tol), ErrorCategory::domain,
            "proportional fairness: tol must be positive");
    const auto& noise = scenario.noise_variances();
    const std::size_t n = noise.size();
    const double budget = scenario.total_power_budget();
    if (n == 1) return Allocation::from_powers({budget}, noise);

    // sum of power_at(lambda) is strictly decreasing in lambda; bracket it so
    // the sum straddles the budget, then bisect lambda.
    double lam_lo = std::numeric_limits<double>::infinity();
    double lam_hi = 0.0;
    for (double s : noise) {
        lam_lo = std::min(lam_lo, marginal(budget, s));
        lam_hi = std::max(lam_hi, marginal(budget / double(n), s));
    }

    std::vector<double> powers(n);
    auto fill_powers = [&](double lambda) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            powers[i] = power_at(lambda, noise[i], budget);
            total += powers[i];
        }
        return total;
    };

    double lo = lam_lo, hi = lam_hi;
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fill_powers(mid) > budget ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    const double total = fill_powers(lambda);

    require(std::abs(total - budget) <= tol * budget, ErrorCategory::numerical,
            "proportional fairness: budget not met within tolerance");
    for (std::size_t i = 0; i < n; ++i) {
        if (powers[i] <= 10.0 * kPowerFloor || powers[i] >= budget * (1.0 - 1e-12))
            continue;  // boundary clamps are exempt from the stationarity check
        require(std::abs(marginal(powers[i], noise[i]) / lambda - 1.0) <= tol,
                ErrorCategory::numerical,
                "proportional fairness: stationarity residual above tolerance");
    }
    return Allocation::from_powers(std::move(powers), noise);
}

}  // namespace ew
