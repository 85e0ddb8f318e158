// edgewater: quantile-fair power allocation over parallel AWGN links.
//
// Subcommands:
//   run          solve the requested schemes and emit report/allocation/trace
//   oracle-check solve ew and compare against the projected-ascent oracle
//   sweep-alpha  solve ew across an alpha grid, emitting slaq and cutoff data
//
// Failures print a one-line JSON object {"category", "message"} on stderr and
// exit with a category-specific code (see README).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ew/errors.hpp"
#include "ew/kernels.hpp"
#include "ew/oracle.hpp"
#include "ew/report.hpp"

namespace {

struct CommonOpts {
    std::string scenario_path;
    std::string schemes = "ew,wf,pf";
    double gamma = 1e-3;
    double eps = 1e-6;
    std::uint64_t iters = 100000;
    std::string schedule = "fixed";
    std::optional<std::uint64_t> seed;
    std::optional<double> mu0;
    std::string out_dir = "out";
    std::string format = "json";
    std::string kernel = "auto";
    bool with_timing = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_schemes) {
    cmd->add_option("--scenario", o.scenario_path, "scenario file path")->required();
    if (with_schemes)
        cmd->add_option("--schemes", o.schemes, "comma-separated subset of ew,wf,pf");
    cmd->add_option("--gamma", o.gamma, "dual stepsize");
    cmd->add_option("--eps", o.eps, "quantile bisection tolerance");
    cmd->add_option("--iters", o.iters, "dual iteration budget");
    cmd->add_option("--schedule", o.schedule, "fixed | corollary1");
    cmd->add_option("--seed", o.seed, "override the scenario's uniform generator seed");
    cmd->add_option("--mu0", o.mu0, "initial dual price (default: waterfilling warm start)");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "report format: json | csv");
    cmd->add_option("--kernel", o.kernel, "kernel variant: auto | scalar | avx2");
    cmd->add_flag("--with-timing", o.with_timing,
                  "include wall-clock timings in emitted files");
}

ew::SolverConfig make_config(const CommonOpts& o) {
    ew::SolverConfig cfg;
    cfg.stepsize = o.gamma;
    cfg.var_tolerance = o.eps;
    cfg.max_iterations = o.iters;
    cfg.initial_dual = o.mu0;
    if (o.schedule == "fixed")
        cfg.schedule = ew::ScheduleMode::fixed;
    else if (o.schedule == "corollary1")
        cfg.schedule = ew::ScheduleMode::corollary1;
    else
        ew::fail(ew::ErrorCategory::config,
                 "unknown schedule '" + o.schedule + "' (expected fixed, corollary1)");
    return cfg;
}

ew::EmitOptions make_emit(const CommonOpts& o) {
    ew::EmitOptions e;
    if (o.format == "json")
        e.format = ew::ReportFormat::json;
    else if (o.format == "csv")
        e.format = ew::ReportFormat::csv;
    else
        ew::fail(ew::ErrorCategory::config,
                 "unknown format '" + o.format + "' (expected json, csv)");
    e.with_timing = o.with_timing;
    return e;
}

ew::ScenarioSpec load_spec(const CommonOpts& o) {
    ew::ScenarioSpec spec = ew::load_scenario_file(o.scenario_path);
    if (o.seed) spec.set_seed(*o.seed);
    return spec;
}

void select_kernel(const CommonOpts& o) {
    if (!ew::kernels::select(o.kernel))
        ew::fail(ew::ErrorCategory::config,
                 "kernel '" + o.kernel + "' is not available on this machine");
}

void print_summary(const ew::RunReport& rep) {
    std::printf("n_terminals=%zu n_alpha=%zu alpha=%s total_power=%s\n",
                rep.n_terminals, rep.n_alpha, ew::format_number(rep.alpha).c_str(),
                ew::format_number(rep.total_power_budget).c_str());
    for (const ew::SchemeResult& r : rep.schemes) {
        if (!r.ok) {
            std::printf("%-3s FAILED: %s\n", ew::scheme_name(r.scheme).data(),
                        r.error.c_str());
            continue;
        }
        std::printf("%-3s slaq_normalized=%-14s slaq_sum=%-14s sum_rate=%-14s%s\n",
                    ew::scheme_name(r.scheme).data(),
                    ew::format_number(r.slaq_normalized).c_str(),
                    ew::format_number(r.slaq_sum).c_str(),
                    ew::format_number(r.sum_rate).c_str(),
                    r.solver ? ("  kernel=" + r.solver->kernel).c_str() : "");
        std::fprintf(stderr, "timing: %s %.3fs\n", ew::scheme_name(r.scheme).data(),
                     r.seconds);
    }
}

int cmd_run(const CommonOpts& o) {
    select_kernel(o);
    const ew::ScenarioSpec spec = load_spec(o);
    const auto schemes = ew::parse_schemes(o.schemes);
    const ew::SolverConfig cfg = make_config(o);
    const ew::RunReport rep = ew::run_schemes(spec, schemes, cfg);
    const auto written = ew::emit_report(rep, o.out_dir, make_emit(o));
    print_summary(rep);
    for (const std::string& path : written) std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_oracle_check(const CommonOpts& o, std::uint64_t oracle_iters,
                     std::uint64_t oracle_seed, double max_gap) {
    select_kernel(o);
    const ew::ScenarioSpec spec = load_spec(o);
    const ew::SolverConfig cfg = make_config(o);

    const ew::Scenario scenario = spec.instantiate();
    if (scenario.n_terminals() > 5)
        ew::fail(ew::ErrorCategory::config,
                 "oracle-check supports at most 5 terminals (got " +
                     std::to_string(scenario.n_terminals()) + ")");

    ew::RunReport rep = ew::run_schemes(spec, {ew::Scheme::ew}, cfg);
    const ew::SchemeResult& ewr = rep.schemes.front();
    if (!ewr.ok) ew::fail(ew::ErrorCategory::numerical, ewr.error);

    const ew::OracleResult oracle =
        ew::oracle_primal_ascent(scenario, oracle_iters, oracle_seed);
    const double oracle_normalized =
        oracle.objective / double(scenario.n_alpha());
    const double gap = std::abs(ewr.slaq_normalized - oracle_normalized);

    const auto written = ew::emit_report(rep, o.out_dir, make_emit(o));
    const std::filesystem::path oracle_path =
        std::filesystem::path(o.out_dir) / "oracle.json";
    {
        nlohmann::ordered_json j;
        j["iterations"] = oracle_iters;
        j["seed"] = oracle_seed;
        j["objective"] = oracle.objective;
        j["objective_normalized"] = oracle_normalized;
        j["gap_normalized"] = gap;
        nlohmann::ordered_json powers = nlohmann::ordered_json::array();
        for (double p : oracle.allocation.powers) powers.push_back(p);
        j["powers"] = std::move(powers);
        std::ofstream out(oracle_path);
        if (!out) ew::fail(ew::ErrorCategory::io,
                           "cannot write '" + oracle_path.string() + "'");
        out << j.dump(2) << "\n";
    }

    print_summary(rep);
    std::printf("oracle slaq_normalized=%s gap=%s\n",
                ew::format_number(oracle_normalized).c_str(),
                ew::format_number(gap).c_str());
    for (const std::string& path : written) std::printf("wrote %s\n", path.c_str());
    std::printf("wrote %s\n", oracle_path.string().c_str());

    if (max_gap > 0.0 && gap > max_gap)
        ew::fail(ew::ErrorCategory::numerical,
                 "ew vs oracle gap " + ew::format_number(gap) + " exceeds " +
                     ew::format_number(max_gap));
    return 0;
}

int cmd_sweep_alpha(const CommonOpts& o, const std::string& alphas_csv) {
    select_kernel(o);
    ew::ScenarioSpec spec = load_spec(o);
    const ew::SolverConfig cfg = make_config(o);

    std::vector<double> alphas;
    std::size_t start = 0;
    while (start <= alphas_csv.size()) {
        std::size_t end = alphas_csv.find(',', start);
        if (end == std::string::npos) end = alphas_csv.size();
        const std::string item = alphas_csv.substr(start, end - start);
        if (!item.empty()) {
            char* tail = nullptr;
            const double a = std::strtod(item.c_str(), &tail);
            if (tail != item.c_str() + item.size() || !(a > 0.0 && a <= 1.0))
                ew::fail(ew::ErrorCategory::config,
                         "--alphas: bad value '" + item + "' (need 0 < alpha <= 1)");
            alphas.push_back(a);
        }
        start = end + 1;
    }
    ew::require(!alphas.empty(), ew::ErrorCategory::config,
                "--alphas: at least one value required");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) ew::fail(ew::ErrorCategory::io,
                     "cannot create output directory '" + o.out_dir + "'");
    const fs::path path = fs::path(o.out_dir) / "alpha_sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) ew::fail(ew::ErrorCategory::io, "cannot write '" + path.string() + "'");
    out << "alpha,n_alpha,slaq_sum,slaq_normalized,mu_hat,t_hat,cutoff_variance,"
           "budget_residual,rescale,iterations\n";

    ew::SolverConfig sweep_cfg = cfg;
    sweep_cfg.record_trace = false;
    for (double a : alphas) {
        ew::ScenarioSpec s = spec;
        s.alpha = a;
        const ew::Scenario scenario = s.instantiate();
        const ew::AllocationResult r = ew::solve_edge(scenario, sweep_cfg);
        out << ew::format_number(a) << ',' << scenario.n_alpha() << ','
            << ew::format_number(r.slaq_sum) << ','
            << ew::format_number(r.slaq_normalized) << ','
            << ew::format_number(r.mu_hat) << ',' << ew::format_number(r.t_hat) << ','
            << ew::format_number(r.cutoff_variance) << ','
            << ew::format_number(r.budget_residual) << ','
            << ew::format_number(r.rescale) << ',' << r.iterations_run << "\n";
        std::printf("alpha=%-6s slaq_normalized=%-14s cutoff=%s\n",
                    ew::format_number(a).c_str(),
                    ew::format_number(r.slaq_normalized).c_str(),
                    ew::format_number(r.cutoff_variance).c_str());
    }
    out.flush();
    if (!out) ew::fail(ew::ErrorCategory::io, "failed writing '" + path.string() + "'");
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

int exit_code(ew::ErrorCategory cat) {
    switch (cat) {
        case ew::ErrorCategory::parse: return 2;
        case ew::ErrorCategory::config: return 3;
        case ew::ErrorCategory::numerical: return 4;
        case ew::ErrorCategory::io: return 5;
        case ew::ErrorCategory::domain: return 6;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"edgewater: quantile-fair power allocation over parallel AWGN links"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "solve schemes and emit artifacts");
    add_common(run, run_opts, true);

    CommonOpts oc_opts;
    std::uint64_t oracle_iters = 400000;
    std::uint64_t oracle_seed = 1234;
    double max_gap = 0.0;
    CLI::App* oc = app.add_subcommand("oracle-check",
                                      "compare ew against the ascent oracle (n <= 5)");
    add_common(oc, oc_opts, false);
    oc->add_option("--oracle-iters", oracle_iters, "oracle ascent iterations");
    oc->add_option("--oracle-seed", oracle_seed, "oracle ascent seed");
    oc->add_option("--max-gap", max_gap,
                   "fail (exit 4) if |ew - oracle| normalized gap exceeds this");

    CommonOpts sweep_opts;
    std::string alphas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
    CLI::App* sweep = app.add_subcommand("sweep-alpha",
                                         "solve ew across an alpha grid");
    add_common(sweep, sweep_opts, false);
    sweep->add_option("--alphas", alphas, "comma-separated alpha grid");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(run_opts);
        if (oc->parsed()) return cmd_oracle_check(oc_opts, oracle_iters, oracle_seed,
                                                  max_gap);
        if (sweep->parsed()) return cmd_sweep_alpha(sweep_opts, alphas);
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        nlohmann::ordered_json j;
        j["category"] = "parse";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return exit_code(ew::ErrorCategory::parse);
    } catch (const ew::Error& e) {
        nlohmann::ordered_json j;
        j["category"] = std::string(ew::to_string(e.category()));
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        nlohmann::ordered_json j;
        j["category"] = "internal";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
}
