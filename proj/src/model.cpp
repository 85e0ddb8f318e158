#include "ew/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ew/errors.hpp"

namespace ew {

std::string_view to_string(ErrorCategory cat) noexcept {
    switch (cat) {
        case ErrorCategory::domain: return "domain";
        case ErrorCategory::parse: return "parse";
        case ErrorCategory::config: return "config";
        case ErrorCategory::numerical: return "numerical";
        case ErrorCategory::io: return "io";
    }
    return "unknown";
}

std::size_t quantile_count(double alpha, std::size_t n) {
    require(n > 0, ErrorCategory::domain, "quantile_count: n must be positive");
    require(alpha > 0.0 && alpha <= 1.0, ErrorCategory::domain,
            "quantile_count: alpha must lie in (0, 1]");
    const double an = alpha * double(n);
    const double nearest = std::round(an);
    double k = (std::abs(an - nearest) <= 1e-9 * std::max(1.0, an)) ? nearest
                                                                    : std::ceil(an);
    k = std::min(std::max(k, 1.0), double(n));
    return std::size_t(k);
}

double rate_of(double power, double noise_variance) {
    require(power >= 0.0, ErrorCategory::domain, "rate_of: power must be >= 0");
    require(noise_variance > 0.0, ErrorCategory::domain,
            "rate_of: noise variance must be > 0");
    return std::log1p(power / noise_variance);
}

double slaq_utility(std::span<const double> values, std::size_t k) {
    require(!values.empty(), ErrorCategory::domain, "slaq_utility: empty value set");
    require(k >= 1 && k <= values.size(), ErrorCategory::domain,
            "slaq_utility: k must lie in [1, n]");
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    return std::accumulate(v.begin(), v.begin() + k, 0.0);
}

double cvar_lower_reward(std::span<const double> values, double alpha_bar) {
    require(!values.empty(), ErrorCategory::domain, "cvar_lower_reward: empty value set");
    const std::size_t n = values.size();
    const double kn = alpha_bar * double(n);
    require(alpha_bar > 0.0 && alpha_bar <= 1.0 + 1e-12, ErrorCategory::domain,
            "cvar_lower_reward: alpha_bar must lie in (0, 1]");
    require(std::abs(kn - std::round(kn)) <= 1e-9 * std::max(1.0, kn),
            ErrorCategory::domain,
            "cvar_lower_reward: alpha_bar must be a multiple of 1/n");

    std::vector<double> z(values.begin(), values.end());
    std::sort(z.begin(), z.end());

    // phi is concave piecewise-linear with breakpoints at the sample values;
    // its slope past the largest sample is 1 - 1/alpha_bar <= 0, so scanning
    // the breakpoints finds the maximum.  At t = z_j the hinge sum runs over
    // the j strictly smaller samples (ties contribute zero).
    const double scale = 1.0 / kn;
    double best = -std::numeric_limits<double>::infinity();
    double prefix = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = z[j];
        best = std::max(best, t - scale * (double(j) * t - prefix));
        prefix += t;
    }
    return best;
}

Scenario::Scenario(std::vector<double> noise_variances, double total_power_budget,
                   double confidence)
    : noise_(std::move(noise_variances)),
      total_power_(total_power_budget),
      alpha_(confidence) {
    require(!noise_.empty(), ErrorCategory::domain,
            "scenario: at least one terminal required");
    for (double s : noise_)
        require(s > 0.0 && std::isfinite(s), ErrorCategory::domain,
                "scenario: noise variances must be positive and finite");
    require(total_power_ > 0.0 && std::isfinite(total_power_), ErrorCategory::domain,
            "scenario: total power budget must be positive and finite");
    require(alpha_ > 0.0 && alpha_ <= 1.0, ErrorCategory::domain,
            "scenario: confidence alpha must lie in (0, 1]");
    n_alpha_ = quantile_count(alpha_, noise_.size());
}

EmpiricalNoiseDistribution::EmpiricalNoiseDistribution(std::span<const double> values) {
    require(!values.empty(), ErrorCategory::domain,
            "noise distribution: empty sample set");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        require(v > 0.0 && std::isfinite(v), ErrorCategory::domain,
                "noise distribution: values must be positive and finite");
    std::sort(sorted.begin(), sorted.end());
    total_ = sorted.size();

    std::size_t count = 0;
    double sum = 0.0, log_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double v = sorted[i];
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == v) ++j;
        count += j - i;
        sum += double(j - i) * v;
        log_sum += double(j - i) * std::log(v);
        support_.push_back(v);
        cum_count_.push_back(count);
        cum_sum_.push_back(sum);
        cum_log_sum_.push_back(log_sum);
        i = j;
    }
}

std::size_t EmpiricalNoiseDistribution::index_le(double x) const noexcept {
    return std::size_t(std::upper_bound(support_.begin(), support_.end(), x) -
                       support_.begin());
}

std::size_t EmpiricalNoiseDistribution::index_lt(double x) const noexcept {
    return std::size_t(std::lower_bound(support_.begin(), support_.end(), x) -
                       support_.begin());
}

std::size_t EmpiricalNoiseDistribution::count_le(double x) const noexcept {
    const std::size_t i = index_le(x);
    return i ? cum_count_[i - 1] : 0;
}

std::size_t EmpiricalNoiseDistribution::count_lt(double x) const noexcept {
    const std::size_t i = index_lt(x);
    return i ? cum_count_[i - 1] : 0;
}

double EmpiricalNoiseDistribution::sum_le(double x) const noexcept {
    const std::size_t i = index_le(x);
    return i ? cum_sum_[i - 1] : 0.0;
}

double EmpiricalNoiseDistribution::sum_lt(double x) const noexcept {
    const std::size_t i = index_lt(x);
    return i ? cum_sum_[i - 1] : 0.0;
}

double EmpiricalNoiseDistribution::log_sum_le(double x) const noexcept {
    const std::size_t i = index_le(x);
    return i ? cum_log_sum_[i - 1] : 0.0;
}

double EmpiricalNoiseDistribution::log_sum_lt(double x) const noexcept {
    const std::size_t i = index_lt(x);
    return i ? cum_log_sum_[i - 1] : 0.0;
}

double EmpiricalNoiseDistribution::mean() const noexcept {
    return cum_sum_.back() / double(total_);
}

double empirical_cdf(const EmpiricalNoiseDistribution& dist, double threshold) {
    return dist.cdf(threshold);
}

double truncated_mean(const EmpiricalNoiseDistribution& dist, double threshold) {
    return dist.truncated_mean(threshold);
}

Allocation Allocation::from_powers(std::vector<double> powers,
                                   std::span<const double> noise_variances) {
    require(powers.size() == noise_variances.size(), ErrorCategory::domain,
            "allocation: power and noise vectors must have equal length");
    Allocation a;
    a.rates.reserve(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i)
        a.rates.push_back(rate_of(powers[i], noise_variances[i]));
    a.powers = std::move(powers);
    return a;
}

double Allocation::sum_power() const noexcept {
    return std::accumulate(powers.begin(), powers.end(), 0.0);
}

double Allocation::sum_rate() const noexcept {
    return std::accumulate(rates.begin(), rates.end(), 0.0);
}

double Allocation::min_rate() const noexcept {
    return rates.empty() ? 0.0 : *std::min_element(rates.begin(), rates.end());
}

}  // namespace ew
