#include "ew/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ew/benchmarks.hpp"
#include "ew/errors.hpp"
#include "ew/kernels.hpp"

namespace ew {

std::string_view scheme_name(Scheme s) noexcept {
    switch (s) {
        case Scheme::ew: return "ew";
        case Scheme::wf: return "wf";
        case Scheme::pf: return "pf";
    }
    return "?";
}

std::vector<Scheme> parse_schemes(std::string_view csv) {
    bool has[3] = {false, false, false};
    std::size_t start = 0;
    bool any = false;
    while (start <= csv.size()) {
        std::size_t end = csv.find(',', start);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view item = csv.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            any = true;
            if (item == "ew")
                has[0] = true;
            else if (item == "wf")
                has[1] = true;
            else if (item == "pf")
                has[2] = true;
            else
                fail(ErrorCategory::config,
                     "unknown scheme '" + std::string(item) + "' (expected ew, wf, pf)");
        }
        start = end + 1;
    }
    require(any, ErrorCategory::config, "scheme set must be nonempty");
    std::vector<Scheme> out;
    if (has[0]) out.push_back(Scheme::ew);
    if (has[1]) out.push_back(Scheme::wf);
    if (has[2]) out.push_back(Scheme::pf);
    return out;
}

std::string format_number(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

// Round through the 12-significant-digit text form so that JSON and CSV carry
// the same numbers and the JSON dump prints them in that short form.
double rounded(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

nlohmann::ordered_json number_array(const std::vector<double>& xs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double x : xs) arr.push_back(rounded(x));
    return arr;
}

SchemeResult run_one(Scheme scheme, const Scenario& scenario,
                     const SolverConfig& config, IterateTrace* trace_out) {
    SchemeResult r;
    r.scheme = scheme;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (scheme) {
            case Scheme::ew: {
                AllocationResult ar = solve_edge(scenario, config);
                r.allocation = std::move(ar.allocation);
                SolverSummary s;
                s.mu_hat = ar.mu_hat;
                s.t_hat = ar.t_hat;
                s.cutoff_variance = ar.cutoff_variance;
                s.budget_residual = ar.budget_residual;
                s.rescale = ar.rescale;
                s.mu_last = ar.mu_last;
                s.t_last = ar.t_last;
                s.dual_bound = ar.dual_bound;
                s.stepsize = config.effective_stepsize();
                s.var_tolerance = config.effective_var_tolerance();
                s.iterations = ar.iterations_run;
                s.schedule =
                    config.schedule == ScheduleMode::corollary1 ? "corollary1" : "fixed";
                s.kernel = std::string(kernels::active_name());
                r.solver = std::move(s);
                if (trace_out) *trace_out = std::move(ar.trace);
                break;
            }
            case Scheme::wf:
                r.allocation = classical_waterfilling(scenario);
                break;
            case Scheme::pf:
                r.allocation = proportional_fairness(scenario);
                break;
        }
        r.slaq_sum = slaq_utility(r.allocation.rates, scenario.n_alpha());
        r.slaq_normalized = r.slaq_sum / double(scenario.n_alpha());
        r.sum_rate = r.allocation.sum_rate();
        r.min_rate = r.allocation.min_rate();
        r.ok = true;
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::numerical) throw;
        r.ok = false;
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    return r;
}

}  // namespace

RunReport run_schemes(const ScenarioSpec& spec, const std::vector<Scheme>& schemes,
                      const SolverConfig& config) {
    require(!schemes.empty(), ErrorCategory::config, "scheme set must be nonempty");
    const Scenario scenario = spec.instantiate();

    RunReport rep;
    rep.spec = spec;
    rep.noise_variances = scenario.noise_variances();
    rep.alpha = scenario.confidence();
    rep.total_power_budget = scenario.total_power_budget();
    rep.n_terminals = scenario.n_terminals();
    rep.n_alpha = scenario.n_alpha();

    for (Scheme s : std::vector<Scheme>{Scheme::ew, Scheme::wf, Scheme::pf}) {
        if (std::find(schemes.begin(), schemes.end(), s) == schemes.end()) continue;
        IterateTrace trace;
        rep.schemes.push_back(
            run_one(s, scenario, config, s == Scheme::ew ? &trace : nullptr));
        if (s == Scheme::ew) rep.trace = std::move(trace);
    }
    return rep;
}

nlohmann::ordered_json report_json(const RunReport& report, bool with_timing) {
    nlohmann::ordered_json j;
    j["scenario"] = {
        {"noise_variances", report.spec.noise_text()},
        {"alpha", rounded(report.alpha)},
        {"total_power_budget", rounded(report.total_power_budget)},
        {"avg_power_budget",
         rounded(report.total_power_budget / double(report.n_terminals))},
        {"n_terminals", report.n_terminals},
        {"n_alpha", report.n_alpha},
    };
    j["schemes"] = nlohmann::ordered_json::array();
    for (const SchemeResult& r : report.schemes) {
        nlohmann::ordered_json s;
        s["name"] = std::string(scheme_name(r.scheme));
        s["status"] = r.ok ? "ok" : "error";
        if (!r.ok) {
            s["error"] = r.error;
            j["schemes"].push_back(std::move(s));
            continue;
        }
        s["slaq_sum"] = rounded(r.slaq_sum);
        s["slaq_normalized"] = rounded(r.slaq_normalized);
        s["sum_rate"] = rounded(r.sum_rate);
        s["min_rate"] = rounded(r.min_rate);
        s["sum_power"] = rounded(r.allocation.sum_power());
        if (r.solver) {
            const SolverSummary& v = *r.solver;
            s["solver"] = {
                {"mu_hat", rounded(v.mu_hat)},
                {"t_hat", rounded(v.t_hat)},
                {"cutoff_variance", rounded(v.cutoff_variance)},
                {"budget_residual", rounded(v.budget_residual)},
                {"rescale", rounded(v.rescale)},
                {"mu_last", rounded(v.mu_last)},
                {"t_last", rounded(v.t_last)},
                {"dual_bound", rounded(v.dual_bound)},
                {"stepsize", rounded(v.stepsize)},
                {"var_tolerance", rounded(v.var_tolerance)},
                {"iterations", v.iterations},
                {"schedule", v.schedule},
                {"kernel", v.kernel},
            };
        }
        if (with_timing) s["seconds"] = rounded(r.seconds);
        s["allocation"] = {
            {"powers", number_array(r.allocation.powers)},
            {"rates", number_array(r.allocation.rates)},
        };
        j["schemes"].push_back(std::move(s));
    }
    return j;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCategory::io, "cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorCategory::io, "failed writing '" + path.string() + "'");
}

void write_report_csv(const RunReport& report, const std::filesystem::path& path,
                      bool with_timing) {
    std::ofstream out = open_out(path);
    out << "scheme,status,slaq_normalized,slaq_sum,sum_rate,min_rate,sum_power,"
           "budget_residual,mu_hat,t_hat,cutoff_variance,rescale,iterations,"
           "stepsize,var_tolerance,schedule,kernel";
    if (with_timing) out << ",seconds";
    out << "\n";
    for (const SchemeResult& r : report.schemes) {
        out << scheme_name(r.scheme) << ',' << (r.ok ? "ok" : "error");
        if (!r.ok) {
            for (int i = 0; i < 15; ++i) out << ',';
            if (with_timing) out << ',' << format_number(r.seconds);
            out << "\n";
            continue;
        }
        out << ',' << format_number(r.slaq_normalized) << ','
            << format_number(r.slaq_sum) << ',' << format_number(r.sum_rate) << ','
            << format_number(r.min_rate) << ','
            << format_number(r.allocation.sum_power());
        if (r.solver) {
            const SolverSummary& v = *r.solver;
            out << ',' << format_number(v.budget_residual) << ','
                << format_number(v.mu_hat) << ',' << format_number(v.t_hat) << ','
                << format_number(v.cutoff_variance) << ',' << format_number(v.rescale)
                << ',' << v.iterations << ',' << format_number(v.stepsize) << ','
                << format_number(v.var_tolerance) << ',' << v.schedule << ','
                << v.kernel;
        } else {
            out << ",,,,,,,,,,";
        }
        if (with_timing) out << ',' << format_number(r.seconds);
        out << "\n";
    }
    finish(out, path);
}

void write_allocations_csv(const RunReport& report,
                           const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "terminal,noise_variance";
    for (const SchemeResult& r : report.schemes)
        if (r.ok)
            out << ",power_" << scheme_name(r.scheme) << ",rate_"
                << scheme_name(r.scheme);
    out << "\n";
    for (std::size_t i = 0; i < report.n_terminals; ++i) {
        out << i << ',' << format_number(report.noise_variances[i]);
        for (const SchemeResult& r : report.schemes) {
            if (!r.ok) continue;
            out << ',' << format_number(r.allocation.powers[i]) << ','
                << format_number(r.allocation.rates[i]);
        }
        out << "\n";
    }
    finish(out, path);
}

void write_trace_csv(const IterateTrace& trace, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "iteration,mu,t,subgradient,dual_estimate,budget_residual\n";
    for (const IterateRecord& r : trace) {
        out << r.iteration << ',' << format_number(r.mu) << ',' << format_number(r.t)
            << ',' << format_number(r.subgradient) << ','
            << format_number(r.dual_estimate) << ','
            << format_number(r.budget_residual) << "\n";
    }
    finish(out, path);
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir,
                                     const EmitOptions& options) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCategory::io, "cannot create output directory '" + out_dir +
                                        "': " + ec.message());

    std::vector<std::string> written;
    if (options.format == ReportFormat::json) {
        const fs::path path = dir / "report.json";
        std::ofstream out = open_out(path);
        out << report_json(report, options.with_timing).dump(2) << "\n";
        finish(out, path);
        written.push_back(path.string());
    } else {
        const fs::path path = dir / "report.csv";
        write_report_csv(report, path, options.with_timing);
        written.push_back(path.string());
    }

    const fs::path alloc_path = dir / "allocations.csv";
    write_allocations_csv(report, alloc_path);
    written.push_back(alloc_path.string());

    if (!report.trace.empty()) {
        const fs::path trace_path = dir / "trace.csv";
        write_trace_csv(report.trace, trace_path);
        written.push_back(trace_path.string());
    }
    return written;
}

}  // namespace ew
