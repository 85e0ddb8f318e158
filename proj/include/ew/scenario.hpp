#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ew/model.hpp"

namespace ew {

// Deterministic generators for noise-variance vectors.
//
// uniform draws from [lo, hi) with a fixed mapping from the raw mt19937_64
// stream: u = (x >> 11) * 2^-53, value = lo + (hi - lo) * u.  The mapping is
// part of the format so scenario files replay identically everywhere.
std::vector<double> generate_uniform(double lo, double hi, std::size_t n,
                                     std::uint64_t seed);
// n points with log10-equispaced values; endpoints are exactly lo and hi.
std::vector<double> generate_logspace(double lo, double hi, std::size_t n);

struct UniformGen {
    double lo, hi;
    std::size_t n;
    std::uint64_t seed;
};
struct LogspaceGen {
    double lo, hi;
    std::size_t n;
};

// Parsed scenario description.  Holds the noise source symbolically so a spec
// can be re-instantiated (or re-seeded) without reparsing.
struct ScenarioSpec {
    std::variant<std::vector<double>, UniformGen, LogspaceGen> noise;
    double alpha = 0.0;
    std::optional<double> avg_power_budget;    // exactly one of the two
    std::optional<double> total_power_budget;  // budgets must be present

    std::string noise_text() const;  // canonical echo of the noise field
    std::vector<double> materialize_noise() const;
    Scenario instantiate() const;

    // Replace the generator seed; config error for non-random sources.
    void set_seed(std::uint64_t seed);
};

// Scenario text format: `key = value` lines, `#` comments, blank lines
// ignored.  Keys: noise_variances (list `[a, b, ...]`, `uniform(lo, hi, n,
// seed=s)` or `logspace(lo, hi, n)`), alpha, and exactly one of
// avg_power_budget / total_power_budget.  Errors name the offending line and
// field.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario_file(const std::string& path);

}  // namespace ew
