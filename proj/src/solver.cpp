#include "ew/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ew/benchmarks.hpp"
#include "ew/errors.hpp"
#include "ew/kernels.hpp"

namespace ew {
namespace {

void check_mu_alpha(double mu, double alpha) {
    require(mu > 0.0 && std::isfinite(mu), ErrorCategory::domain,
            "dual price mu must be positive and finite");
    require(alpha > 0.0 && alpha <= 1.0, ErrorCategory::domain,
            "alpha must lie in (0, 1]");
}

// Aggregates of the three noise bands induced by (mu, t):
//   plateau       s <= cutoff = e^{-t}/(mu*alpha)   (rate pinned at t)
//   waterfilling  cutoff < s < c = 1/(mu*alpha)     (power c - s)
//   zero          s >= c
// Everything the dual estimate needs comes from prefix sums, so evaluating
// these is O(log n) regardless of instance size.
struct Bands {
    double c = 0.0, cutoff = 0.0, m = 0.0;  // m = e^t - 1
    std::size_t n_plateau = 0, n_wf = 0, n_zero = 0;
    double sum_plateau = 0.0, sum_wf = 0.0, log_sum_wf = 0.0;
};

Bands split_bands(const EmpiricalNoiseDistribution& dist, double mu, double t,
                  double alpha) {
    Bands b;
    b.c = 1.0 / (mu * alpha);
    b.cutoff = std::exp(-t) * b.c;
    b.m = std::expm1(t);
    const std::size_t n = dist.total_count();
    const std::size_t n_le_cut = dist.count_le(b.cutoff);
    // At t = 0 the two thresholds coincide; a support point sitting exactly
    // there belongs to the (empty-power) plateau, never to a negative band.
    const std::size_t n_lt_c = std::max(dist.count_lt(b.c), n_le_cut);
    b.n_plateau = n_le_cut;
    b.n_wf = n_lt_c - n_le_cut;
    b.n_zero = n - n_lt_c;
    b.sum_plateau = dist.sum_le(b.cutoff);
    if (b.n_wf > 0) {
        b.sum_wf = dist.sum_lt(b.c) - b.sum_plateau;
        b.log_sum_wf = dist.log_sum_lt(b.c) - dist.log_sum_le(b.cutoff);
    }
    return b;
}

double mean_policy(const Bands& b, std::size_t n) {
    return (b.m * b.sum_plateau + b.c * double(b.n_wf) - b.sum_wf) / double(n);
}

// E[(t - rate)_+] at the band policy: plateau rates equal t (zero hinge),
// waterfilling rates are log(c / s), zero-band rates are 0.
double mean_hinge(const Bands& b, double t, std::size_t n) {
    const double wf = double(b.n_wf) * (t - std::log(b.c)) + b.log_sum_wf;
    return (wf + double(b.n_zero) * t) / double(n);
}

double lagrangian_at(const EmpiricalNoiseDistribution& dist, double mu, double t,
                     double alpha, double avg_budget) {
    const Bands b = split_bands(dist, mu, t, alpha);
    const std::size_t n = dist.total_count();
    return t - mean_hinge(b, t, n) / alpha + mu * (avg_budget - mean_policy(b, n));
}

double dual_bound_impl(const EmpiricalNoiseDistribution& dist, double alpha,
                       double avg_budget, double t_max, double probe_mu,
                       double epsilon) {
    const double t_probe = solve_var(dist, probe_mu, alpha, epsilon, t_max);
    const double q = lagrangian_at(dist, probe_mu, t_probe, alpha, avg_budget);
    // p_i = avg_budget/2, t = 0 is Slater with objective 0, so every optimal
    // dual price satisfies mu* <= q(probe) / (avg_budget / 2).
    const double bound = 2.0 * q / avg_budget;
    require(std::isfinite(bound) && bound > 0.0, ErrorCategory::config,
            "dual bound: probe produced a non-positive or non-finite bound");
    return bound;
}

}  // namespace

double optimal_policy(double noise_variance, double mu, double t, double alpha) {
    require(noise_variance > 0.0 && std::isfinite(noise_variance),
            ErrorCategory::domain, "optimal_policy: noise variance must be positive");
    require(t >= 0.0 && std::isfinite(t), ErrorCategory::domain,
            "optimal_policy: t must be >= 0");
    check_mu_alpha(mu, alpha);
    const double wf = std::max(1.0 / (mu * alpha) - noise_variance, 0.0);
    return std::min(wf, noise_variance * std::expm1(t));
}

double var_residual(const EmpiricalNoiseDistribution& dist, double t, double mu,
                    double alpha) {
    require(t >= 0.0 && std::isfinite(t), ErrorCategory::domain,
            "var_residual: t must be >= 0");
    check_mu_alpha(mu, alpha);
    const double u = std::exp(-t) / (mu * alpha);
    const std::size_t n_le = dist.count_le(u);
    if (n_le == 0) return 0.0;
    return (double(n_le) - dist.sum_le(u) / u) / double(dist.total_count());
}

VarBracket solve_var_bracket(const EmpiricalNoiseDistribution& dist, double mu,
                             double alpha, double epsilon, double t_max) {
    check_mu_alpha(mu, alpha);
    require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCategory::domain,
            "solve_var: epsilon must be positive");
    require(t_max > 0.0 && std::isfinite(t_max), ErrorCategory::domain,
            "solve_var: t_max must be positive");

    const double target = 1.0 - alpha;
    auto residual = [&](double t) { return var_residual(dist, t, mu, alpha) - target; };

    if (residual(0.0) < 0.0) return {0.0, 0.0, 0.0, true, false};
    if (residual(t_max) > 0.0) return {t_max, t_max, t_max, false, true};

    // Invariant: residual(lo) >= 0 >= residual(hi).  G is nonincreasing, so
    // the sign test steers the correct endpoint; the width halves every pass.
    double lo = 0.0, hi = t_max;
    while (hi - lo > epsilon) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) >= 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), lo, hi, false, false};
}

double solve_var(const EmpiricalNoiseDistribution& dist, double mu, double alpha,
                 double epsilon, double t_max) {
    return solve_var_bracket(dist, mu, alpha, epsilon, t_max).t;
}

double policy_mean_prefix(const EmpiricalNoiseDistribution& dist, double mu, double t,
                          double alpha) {
    require(t >= 0.0 && std::isfinite(t), ErrorCategory::domain,
            "policy_mean_prefix: t must be >= 0");
    check_mu_alpha(mu, alpha);
    return mean_policy(split_bands(dist, mu, t, alpha), dist.total_count());
}

double dual_subgradient(const Scenario& scenario, double mu, double t) {
    require(t >= 0.0 && std::isfinite(t), ErrorCategory::domain,
            "dual_subgradient: t must be >= 0");
    check_mu_alpha(mu, scenario.confidence());
    const auto& noise = scenario.noise_variances();
    const double c = 1.0 / (mu * scenario.confidence());
    const double m = std::expm1(t);
    const double mean =
        kernels::active().policy_sum(noise.data(), noise.size(), c, m) /
        double(noise.size());
    return scenario.avg_power_budget() - mean;
}

void SolverConfig::validate() const {
    require(stepsize > 0.0 && std::isfinite(stepsize), ErrorCategory::config,
            "solver config: stepsize must be positive");
    require(var_tolerance > 0.0 && std::isfinite(var_tolerance), ErrorCategory::config,
            "solver config: var_tolerance must be positive");
    require(max_iterations >= 1, ErrorCategory::config,
            "solver config: max_iterations must be >= 1");
    require(dual_floor > 0.0 && std::isfinite(dual_floor), ErrorCategory::config,
            "solver config: dual_floor must be positive");
    require(probe_mu > 0.0 && std::isfinite(probe_mu), ErrorCategory::config,
            "solver config: probe_mu must be positive");
    require(early_stop_grad_tol >= 0.0, ErrorCategory::config,
            "solver config: early_stop_grad_tol must be >= 0");
    if (initial_dual)
        require(*initial_dual > 0.0 && std::isfinite(*initial_dual),
                ErrorCategory::config, "solver config: initial_dual must be positive");
}

double SolverConfig::effective_stepsize() const {
    return schedule == ScheduleMode::corollary1
               ? 1.0 / std::sqrt(double(max_iterations))
               : stepsize;
}

double SolverConfig::effective_var_tolerance() const {
    return schedule == ScheduleMode::corollary1
               ? 1.0 / std::sqrt(double(max_iterations))
               : var_tolerance;
}

EdgeSolver::EdgeSolver(Scenario scenario, SolverConfig config)
    : scenario_(std::move(scenario)),
      config_(config),
      dist_(scenario_.noise_variances()) {
    config_.validate();
    t_max_ = std::log1p(scenario_.total_power_budget() / dist_.min_value());
    dual_bound_ = dual_bound_impl(dist_, scenario_.confidence(),
                                  scenario_.avg_power_budget(), t_max_,
                                  config_.probe_mu, config_.effective_var_tolerance());
    require(dual_bound_ > config_.dual_floor, ErrorCategory::config,
            "solver config: dual bound does not exceed dual_floor");
    const double mu0 =
        config_.initial_dual ? *config_.initial_dual : balanced_dual_price();
    mu0_ = std::clamp(mu0, config_.dual_floor, dual_bound_);
}

// Zero crossing of the subgradient g(mu) = avg budget - mean policy power.
// g is nondecreasing in mu, so bisection over [dual_floor, dual_bound]
// locates the dual optimum with O(log N) work per probe.  When the quantile
// cap keeps g positive on the whole interval (a flat dual, e.g. N = 1) the
// waterfilling-level price is returned instead; it is exact in that regime.
double EdgeSolver::balanced_dual_price() const {
    const double alpha = scenario_.confidence();
    const double pbar = scenario_.avg_power_budget();
    const double eps = config_.effective_var_tolerance();
    const auto g_of = [&](double mu) {
        const double t = solve_var(dist_, mu, alpha, eps, t_max_);
        return pbar - policy_mean_prefix(dist_, mu, t, alpha);
    };
    double lo = config_.dual_floor;
    double hi = dual_bound_;
    if (g_of(hi) < 0.0) return hi;
    if (g_of(lo) > 0.0)
        return 1.0 / (alpha * waterfilling_level(scenario_));
    // The quantile cap can flatten g to zero on a prefix of the interval, so
    // track the upper edge of {g <= 0}: that point balances the budget and
    // is the dual optimum.
    for (int i = 0; i < 100 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g_of(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double EdgeSolver::lagrangian(double mu, double t) const {
    require(t >= 0.0 && std::isfinite(t), ErrorCategory::domain,
            "lagrangian: t must be >= 0");
    check_mu_alpha(mu, scenario_.confidence());
    return lagrangian_at(dist_, mu, t, scenario_.confidence(),
                         scenario_.avg_power_budget());
}

DualState EdgeSolver::initial_state() const {
    DualState st;
    st.mu = mu0_;
    st.t = 0.0;
    return st;
}

DualState EdgeSolver::step_impl(const DualState& state, IterateTrace* trace,
                                double* subgradient_out) const {
    const double alpha = scenario_.confidence();
    const double eps = config_.effective_var_tolerance();
    const std::size_t n = scenario_.n_terminals();

    const double t = solve_var(dist_, state.mu, alpha, eps, t_max_);
    // Prefix-sum route: O(log n) per step, agrees with the kernel sweep over
    // the raw array to rounding error (see the kernel equivalence tests).
    const double mean_p = policy_mean_prefix(dist_, state.mu, t, alpha);
    const double g = scenario_.avg_power_budget() - mean_p;

    DualState next;
    next.mu = std::clamp(state.mu - config_.effective_stepsize() * g,
                         config_.dual_floor, dual_bound_);
    next.t = t;
    next.mu_sum = state.mu_sum + state.mu;
    next.iteration = state.iteration + 1;

    if (trace) {
        const Bands b = split_bands(dist_, state.mu, t, alpha);
        const double estimate =
            t - mean_hinge(b, t, n) / alpha + state.mu * g;
        trace->push_back(IterateRecord{next.iteration, state.mu, t, g, estimate,
                                       double(n) * g});
    }
    if (subgradient_out) *subgradient_out = g;
    return next;
}

DualState EdgeSolver::step(const DualState& state, IterateTrace* trace) const {
    return step_impl(state, trace, nullptr);
}

AllocationResult EdgeSolver::solve() const {
    AllocationResult out;
    out.dual_bound = dual_bound_;

    IterateTrace trace;
    if (config_.record_trace) trace.reserve(config_.max_iterations);
    IterateTrace* trace_ptr = config_.record_trace ? &trace : nullptr;

    DualState state = initial_state();
    int settled = 0;
    for (std::uint64_t k = 0; k < config_.max_iterations; ++k) {
        double g = 0.0;
        state = step_impl(state, trace_ptr, &g);
        if (config_.early_stop_grad_tol > 0.0) {
            settled = (std::abs(g) <= config_.early_stop_grad_tol) ? settled + 1 : 0;
            if (settled >= 100) break;
        }
    }

    const double alpha = scenario_.confidence();
    const double eps = config_.effective_var_tolerance();
    const std::size_t n = scenario_.n_terminals();
    const auto& noise = scenario_.noise_variances();

    // Primal recovery at the averaged dual iterate.
    const double mu_hat = state.mu_avg();
    const double t_hat = solve_var(dist_, mu_hat, alpha, eps, t_max_);
    const double c = 1.0 / (mu_hat * alpha);
    const double m = std::expm1(t_hat);

    std::vector<double> powers(n);
    kernels::active().policy_eval(noise.data(), n, c, m, powers.data());
    const double total = kernels::active().sum(powers.data(), n);
    const double budget = scenario_.total_power_budget();

    out.budget_residual = budget - total;
    if (total > budget) {
        out.rescale = budget / total;
        for (double& p : powers) p *= out.rescale;
    }
    out.allocation = Allocation::from_powers(std::move(powers), noise);
    out.slaq_sum = slaq_utility(out.allocation.rates, scenario_.n_alpha());
    out.slaq_normalized = out.slaq_sum / double(scenario_.n_alpha());

    out.mu_hat = mu_hat;
    out.t_hat = t_hat;
    out.cutoff_variance = std::exp(-t_hat) * c;
    out.mu_last = state.mu;
    out.t_last = state.t;
    out.iterations_run = state.iteration;
    out.trace = std::move(trace);
    return out;
}

double dual_bound(const Scenario& scenario, double probe_mu) {
    require(probe_mu > 0.0 && std::isfinite(probe_mu), ErrorCategory::domain,
            "dual_bound: probe_mu must be positive");
    const EmpiricalNoiseDistribution dist(scenario.noise_variances());
    const double t_max =
        std::log1p(scenario.total_power_budget() / dist.min_value());
    return dual_bound_impl(dist, scenario.confidence(), scenario.avg_power_budget(),
                           t_max, probe_mu, 1e-6);
}

AllocationResult solve_edge(const Scenario& scenario, const SolverConfig& config) {
    return EdgeSolver(scenario, config).solve();
}

}  // namespace ew
