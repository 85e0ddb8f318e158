#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ew/scenario.hpp"
#include "ew/solver.hpp"

namespace ew {

enum class Scheme { ew, wf, pf };

std::string_view scheme_name(Scheme s) noexcept;
// Comma-separated subset of "ew,wf,pf"; duplicates collapse, output keeps the
// canonical ew, wf, pf order.  Unknown names or an empty set are config errors.
std::vector<Scheme> parse_schemes(std::string_view csv);

// Solver metadata carried into reports for the ew scheme only.
struct SolverSummary {
    double mu_hat = 0.0, t_hat = 0.0, cutoff_variance = 0.0;
    double budget_residual = 0.0, rescale = 1.0;
    double mu_last = 0.0, t_last = 0.0, dual_bound = 0.0;
    double stepsize = 0.0, var_tolerance = 0.0;
    std::uint64_t iterations = 0;
    std::string schedule;
    std::string kernel;
};

struct SchemeResult {
    Scheme scheme{};
    bool ok = false;
    std::string error;  // category-prefixed message when ok is false
    Allocation allocation;
    double slaq_sum = 0.0, slaq_normalized = 0.0;
    double sum_rate = 0.0, min_rate = 0.0;
    double seconds = 0.0;  // wall clock; only emitted opt-in
    std::optional<SolverSummary> solver;
};

struct RunReport {
    ScenarioSpec spec;
    std::vector<double> noise_variances;  // instantiated once, shared by schemes
    double alpha = 0.0;
    double total_power_budget = 0.0;
    std::size_t n_terminals = 0;
    std::size_t n_alpha = 0;
    std::vector<SchemeResult> schemes;  // canonical order
    IterateTrace trace;                 // ew dual trace; empty otherwise
};

// Run the requested schemes on one instantiation of the scenario.  A scheme
// that throws a numerical error is recorded as failed instead of aborting the
// run; domain/config errors still propagate.
RunReport run_schemes(const ScenarioSpec& spec, const std::vector<Scheme>& schemes,
                      const SolverConfig& config);

enum class ReportFormat { json, csv };

struct EmitOptions {
    ReportFormat format = ReportFormat::json;
    // Wall-clock timings vary run to run, so they are kept out of the files
    // by default; emitted artifacts are byte-identical across reruns.
    bool with_timing = false;
};

// All numbers in emitted artifacts go through this (shortest round-trippable
// 12-significant-digit form).
std::string format_number(double x);

nlohmann::ordered_json report_json(const RunReport& report, bool with_timing);

// Writes report.{json|csv}, allocations.csv and, when a trace is present,
// trace.csv under out_dir (created if missing).  Returns the paths written.
std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir,
                                     const EmitOptions& options);

}  // namespace ew
