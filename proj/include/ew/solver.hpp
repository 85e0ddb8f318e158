#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ew/model.hpp"

namespace ew {

// ---------------------------------------------------------------------------
// Closed-form inner maximizer (per-terminal policy).
//
// For dual price mu > 0, quantile level t >= 0 and confidence alpha in (0,1],
// the optimal transmit power for a terminal with noise variance s is
//
//     p*(s) = min( max(1/(mu*alpha) - s, 0), s * (e^t - 1) ).
//
// Terminals split into three bands by s: a plateau s <= e^{-t}/(mu*alpha)
// where the rate equals t exactly, a waterfilling band up to 1/(mu*alpha),
// and a cut-off band that gets nothing.
// ---------------------------------------------------------------------------
double optimal_policy(double noise_variance, double mu, double t, double alpha);

// Residual of the quantile (VaR) condition at level t:
//     G(t) = F(u) - E[V 1{V <= u}]/u,   u = e^{-t} / (mu * alpha),
// where F is the noise cdf.  G is continuous and nonincreasing in t even
// though F itself jumps; the inner solution t*(mu) is a root of G = 1 - alpha.
double var_residual(const EmpiricalNoiseDistribution& dist, double t, double mu,
                    double alpha);

struct VarBracket {
    double t;             // midpoint estimate
    double lo, hi;        // bracketing interval, hi - lo <= epsilon unless clamped
    bool clamped_low;     // G(0) already below 1 - alpha; t = 0
    bool clamped_high;    // G(t_max) still above 1 - alpha; t = t_max
};

// Bisection for the root of var_residual(t) = 1 - alpha on [0, t_max].
// Interval width halves every step, so the loop runs at most
// ceil(log2(t_max / epsilon)) iterations.  The bracket invariant
// G(lo) >= 1 - alpha >= G(hi) holds whenever neither clamp fires.
VarBracket solve_var_bracket(const EmpiricalNoiseDistribution& dist, double mu,
                             double alpha, double epsilon, double t_max);
double solve_var(const EmpiricalNoiseDistribution& dist, double mu, double alpha,
                 double epsilon, double t_max);

// Mean optimal power E[p*(V)] under (mu, t), evaluated from the distribution's
// prefix sums in O(log n).  Mirrors kernels::policy_sum / n over the raw
// array; the two routes agree to rounding error.
double policy_mean_prefix(const EmpiricalNoiseDistribution& dist, double mu,
                          double t, double alpha);

// Subgradient of the dual function at mu, with the inner variables already
// maximized at quantile level t:  g(mu) = avg_budget - E[p*(V; mu, t)].
double dual_subgradient(const Scenario& scenario, double mu, double t);

// ---------------------------------------------------------------------------
// Dual projected-subgradient solver.
// ---------------------------------------------------------------------------

enum class ScheduleMode {
    fixed,       // use stepsize / var_tolerance as given
    corollary1,  // stepsize = var_tolerance = 1/sqrt(max_iterations)
};

struct SolverConfig {
    double stepsize = 1e-3;        // gamma
    double var_tolerance = 1e-6;   // epsilon for the quantile bisection
    std::uint64_t max_iterations = 100000;

    // Initial dual price.  When unset the solver warm-starts at the
    // budget-balancing price: the subgradient g(mu) is nondecreasing in mu,
    // so its zero crossing (the dual optimum) is found by a cheap bisection
    // over prefix-sum evaluations before the iteration begins.  This keeps
    // the time-averaged iterate free of a cold-start transient.  In the flat
    // regime where the quantile cap leaves g positive everywhere (e.g. a
    // single terminal), the fallback is 1/(alpha * waterfilling level),
    // which is exact there.
    std::optional<double> initial_dual;

    double dual_floor = 1e-9;      // lower clamp of the projection interval
    double probe_mu = 1.0;         // dual point probed for the bound K_D
    ScheduleMode schedule = ScheduleMode::fixed;

    // When positive, stop once |subgradient| stayed within this tolerance for
    // 100 consecutive iterations.
    double early_stop_grad_tol = 0.0;

    bool record_trace = true;

    void validate() const;  // throws Error(config) on nonsense
    double effective_stepsize() const;
    double effective_var_tolerance() const;
};

struct DualState {
    double mu = 0.0;
    double t = 0.0;          // quantile level used by the latest step
    double mu_sum = 0.0;     // sum of the iterates mu^(0) .. mu^(k-1)
    std::uint64_t iteration = 0;

    double mu_avg() const noexcept {
        return iteration ? mu_sum / double(iteration) : mu;
    }
};

struct IterateRecord {
    std::uint64_t iteration;  // 1-based
    double mu;                // iterate the step departed from
    double t;                 // quantile level solved at that iterate
    double subgradient;       // avg_budget - mean power
    double dual_estimate;     // Lagrangian value at the iterate's policy
    double budget_residual;   // total units: P0 - sum of policy powers
};
using IterateTrace = std::vector<IterateRecord>;

struct AllocationResult {
    Allocation allocation;

    double mu_hat = 0.0;            // averaged dual price used for recovery
    double t_hat = 0.0;             // quantile level at mu_hat
    double cutoff_variance = 0.0;   // e^{-t_hat}/(mu_hat*alpha): plateau edge

    double slaq_sum = 0.0;          // sum of the n_alpha smallest rates
    double slaq_normalized = 0.0;   // slaq_sum / n_alpha

    double budget_residual = 0.0;   // P0 - sum(powers) before any rescale
    double rescale = 1.0;           // applied factor; < 1 only on overshoot

    double mu_last = 0.0;           // final iterate (not the average)
    double t_last = 0.0;
    double dual_bound = 0.0;        // K_D used as the projection ceiling
    std::uint64_t iterations_run = 0;

    IterateTrace trace;             // empty when record_trace is off
};

class EdgeSolver {
  public:
    EdgeSolver(Scenario scenario, SolverConfig config);

    // Upper end of the dual projection interval, K_D = 2 q(probe_mu) / avg
    // budget, valid because p_i = avg_budget/2, t = 0 is Slater for the
    // average-power constraint.
    double dual_bound() const noexcept { return dual_bound_; }
    double t_max() const noexcept { return t_max_; }
    double initial_mu() const noexcept { return mu0_; }
    const Scenario& scenario() const noexcept { return scenario_; }
    const SolverConfig& config() const noexcept { return config_; }

    // Lagrangian value at the policy induced by (mu, t); an upper estimate of
    // the primal optimum when t solves the quantile condition at mu.
    double lagrangian(double mu, double t) const;

    DualState initial_state() const;
    // One projected subgradient step.  Appends to *trace when non-null.
    DualState step(const DualState& state, IterateTrace* trace) const;

    AllocationResult solve() const;

  private:
    DualState step_impl(const DualState& state, IterateTrace* trace,
                        double* subgradient_out) const;
    double balanced_dual_price() const;

    Scenario scenario_;
    SolverConfig config_;
    EmpiricalNoiseDistribution dist_;
    double t_max_;
    double dual_bound_;
    double mu0_;
};

// Probe the dual set bound without building a solver.
double dual_bound(const Scenario& scenario, double probe_mu);

AllocationResult solve_edge(const Scenario& scenario, const SolverConfig& config);

}  // namespace ew
