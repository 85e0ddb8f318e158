#include "ew/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ew/errors.hpp"

namespace ew {

std::vector<double> project_budget_box(std::vector<double> p, double budget) {
    require(budget > 0.0 && std::isfinite(budget), ErrorCategory::domain,
            "projection: budget must be positive");
    require(!p.empty(), ErrorCategory::domain, "projection: empty vector");

    double clipped_total = 0.0;
    for (double v : p) clipped_total += std::max(v, 0.0);
    if (clipped_total <= budget) {
        for (double& v : p) v = std::max(v, 0.0);
        return p;
    }

    // Over budget: the projection lands on the simplex face sum = budget,
    // p_i = max(y_i - tau, 0) with tau from the sorted partial-sum rule.
    std::vector<double> u = p;
    std::sort(u.begin(), u.end(), std::greater<>());
    double running = 0.0, tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        running += u[i];
        const double cand = (running - budget) / double(i + 1);
        if (u[i] - cand > 0.0)
            tau = cand;
        else
            break;
    }
    for (double& v : p) v = std::max(v - tau, 0.0);
    return p;
}

OracleResult oracle_primal_ascent(const Scenario& scenario, std::uint64_t iterations,
                                  std::uint64_t seed) {
    require(iterations >= 1, ErrorCategory::config,
            "oracle: iterations must be >= 1");
    const auto& noise = scenario.noise_variances();
    const std::size_t n = noise.size();
    const std::size_t k = scenario.n_alpha();
    const double budget = scenario.total_power_budget();
    const double avg = scenario.avg_power_budget();

    // Same raw-stream mapping as the uniform scenario generator, so oracle
    // runs replay exactly for a given seed.
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };

    std::vector<double> p(n);
    for (double& v : p) v = avg * (0.5 + unit());
    p = project_budget_box(std::move(p), budget);

    std::vector<double> rates(n), scratch(n), weights(n);
    std::vector<double> best_p = p;
    double best_obj = -std::numeric_limits<double>::infinity();
    OracleResult out;
    const std::uint64_t stride = std::max<std::uint64_t>(iterations / 100, 1);

    for (std::uint64_t it = 1; it <= iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i)
            rates[i] = std::log1p(p[i] / noise[i]);

        scratch = rates;
        std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
        const double threshold = scratch[k - 1];
        double obj = 0.0;
        for (std::size_t i = 0; i < k; ++i) obj += scratch[i];
        if (obj > best_obj) {
            best_obj = obj;
            best_p = p;
        }
        if (it % stride == 0 || it == iterations)
            out.best_objective_checkpoints.push_back(best_obj);

        // Supergradient of the sum of the k smallest rates: weight 1 on
        // strictly-below-threshold terminals, the remainder shared across the
        // tied group (relative tie tolerance 1e-9).
        const double tie = 1e-9 * std::max(1.0, std::abs(threshold));
        std::size_t n_strict = 0, n_tied = 0;
        for (double r : rates) {
            if (r < threshold - tie)
                ++n_strict;
            else if (r <= threshold + tie)
                ++n_tied;
        }
        const double share = double(k - n_strict) / double(n_tied);
        for (std::size_t i = 0; i < n; ++i) {
            double w = 0.0;
            if (rates[i] < threshold - tie)
                w = 1.0;
            else if (rates[i] <= threshold + tie)
                w = share;
            weights[i] = w;
        }

        const double step = avg / std::sqrt(double(it));
        for (std::size_t i = 0; i < n; ++i)
            p[i] += step * weights[i] / (noise[i] + p[i]);
        p = project_budget_box(std::move(p), budget);
    }

    out.allocation = Allocation::from_powers(std::move(best_p), noise);
    out.objective = best_obj;
    return out;
}

OracleResult oracle_grid(const Scenario& scenario, double step) {
    require(step > 0.0 && std::isfinite(step), ErrorCategory::domain,
            "oracle grid: step must be positive");
    const auto& noise = scenario.noise_variances();
    const std::size_t n = noise.size();
    require(n <= 3, ErrorCategory::domain,
            "oracle grid: supported only for n <= 3 terminals");
    const std::size_t k = scenario.n_alpha();
    const double budget = scenario.total_power_budget();

    // Rates increase with power, so the optimum exhausts the budget; only the
    // face sum(p) = budget is scanned.
    std::vector<double> best_p;
    double best_obj = -std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& p) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = std::log1p(p[i] / noise[i]);
        const double obj = slaq_utility(r, k);
        if (obj > best_obj) {
            best_obj = obj;
            best_p = p;
        }
    };

    if (n == 1) {
        consider({budget});
    } else if (n == 2) {
        const std::size_t m = std::size_t(budget / step);
        for (std::size_t i = 0; i <= m; ++i) {
            const double p0 = std::min(double(i) * step, budget);
            consider({p0, budget - p0});
        }
        consider({budget, 0.0});
    } else {
        const std::size_t m = std::size_t(budget / step);
        for (std::size_t i = 0; i <= m; ++i) {
            const double p0 = std::min(double(i) * step, budget);
            for (std::size_t j = 0; i + j <= m; ++j) {
                const double p1 = std::min(double(j) * step, budget - p0);
                consider({p0, p1, std::max(budget - p0 - p1, 0.0)});
            }
        }
    }

    OracleResult out;
    out.allocation = Allocation::from_powers(std::move(best_p), noise);
    out.objective = best_obj;
    out.best_objective_checkpoints.push_back(best_obj);
    return out;
}

}  // namespace ew
