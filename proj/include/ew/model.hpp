#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ew {

// Number of terminals kept by the sum-least-alpha-quantile utility:
// ceil(alpha * n), with a small snap-to-integer guard so that products like
// 0.7 * 10 that land within 1e-9 of an integer round instead of ceiling up.
std::size_t quantile_count(double alpha, std::size_t n);

// Shannon rate of a single AWGN link, in nats: log(1 + power / noise_variance).
double rate_of(double power, double noise_variance);

// Sum of the k smallest entries of `values`.
double slaq_utility(std::span<const double> values, std::size_t k);

// Lower-CVaR reward -CVaR_{alpha_bar}(-Z) for the empirical distribution of
// `values`, computed by maximizing the variational form
//   phi(t) = t - (1 / (alpha_bar * n)) * sum_i (t - z_i)_+
// over its breakpoints.  alpha_bar must be a multiple of 1/n (up to fp noise),
// which makes the result exactly slaq_utility(values, alpha_bar * n) scaled
// by 1 / (alpha_bar * n).
double cvar_lower_reward(std::span<const double> values, double alpha_bar);

// One resource-allocation problem instance.
class Scenario {
  public:
    Scenario(std::vector<double> noise_variances, double total_power_budget,
             double confidence);

    const std::vector<double>& noise_variances() const noexcept { return noise_; }
    std::size_t n_terminals() const noexcept { return noise_.size(); }
    double total_power_budget() const noexcept { return total_power_; }
    double avg_power_budget() const noexcept { return total_power_ / double(noise_.size()); }
    double confidence() const noexcept { return alpha_; }
    std::size_t n_alpha() const noexcept { return n_alpha_; }

  private:
    std::vector<double> noise_;
    double total_power_;
    double alpha_;
    std::size_t n_alpha_;
};

// Empirical distribution of the noise variances.  Values are deduplicated and
// sorted; prefix sums over counts, values and log-values make the cdf and the
// truncated first moment O(log n) lookups.  The solver leans on this for its
// quantile bisection and for closed-form dual estimates, which is what keeps
// the per-iteration cost flat as instances grow.
class EmpiricalNoiseDistribution {
  public:
    explicit EmpiricalNoiseDistribution(std::span<const double> values);

    std::size_t total_count() const noexcept { return total_; }
    const std::vector<double>& support() const noexcept { return support_; }
    double min_value() const noexcept { return support_.front(); }
    double max_value() const noexcept { return support_.back(); }

    std::size_t count_le(double x) const noexcept;   // #{ v : v <= x }
    std::size_t count_lt(double x) const noexcept;   // #{ v : v <  x }
    double sum_le(double x) const noexcept;          // sum of v over v <= x
    double sum_lt(double x) const noexcept;
    double log_sum_le(double x) const noexcept;      // sum of log(v) over v <= x
    double log_sum_lt(double x) const noexcept;

    double cdf(double x) const noexcept { return double(count_le(x)) / double(total_); }
    // E[V * 1{V <= x}]; increases from 0 to mean() as x sweeps the support.
    double truncated_mean(double x) const noexcept { return sum_le(x) / double(total_); }
    double mean() const noexcept;

  private:
    std::size_t index_le(double x) const noexcept;   // #support entries <= x
    std::size_t index_lt(double x) const noexcept;

    std::size_t total_ = 0;
    std::vector<double> support_;
    std::vector<std::size_t> cum_count_;
    std::vector<double> cum_sum_;
    std::vector<double> cum_log_sum_;
};

// Convenience wrappers matching the distribution queries.
double empirical_cdf(const EmpiricalNoiseDistribution& dist, double threshold);
double truncated_mean(const EmpiricalNoiseDistribution& dist, double threshold);

// A feasible point together with the rates it induces.  Rates are always
// derived from powers, never stored independently.
struct Allocation {
    std::vector<double> powers;
    std::vector<double> rates;

    static Allocation from_powers(std::vector<double> powers,
                                  std::span<const double> noise_variances);

    double sum_power() const noexcept;
    double sum_rate() const noexcept;
    double min_rate() const noexcept;
};

}  // namespace ew
