#include "ew/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ew/errors.hpp"

namespace ew {

std::vector<double> generate_uniform(double lo, double hi, std::size_t n,
                                     std::uint64_t seed) {
    require(lo > 0.0 && hi > lo, ErrorCategory::domain,
            "uniform generator: bounds must satisfy 0 < lo < hi");
    require(n >= 1, ErrorCategory::domain, "uniform generator: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    // Fixed mapping from the raw 64-bit stream: top 53 bits -> [0, 1).
    for (double& v : out)
        v = lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
    return out;
}

std::vector<double> generate_logspace(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo, ErrorCategory::domain,
            "logspace generator: bounds must satisfy 0 < lo < hi");
    require(n >= 1, ErrorCategory::domain, "logspace generator: n must be >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, l0 + (l1 - l0) * double(i) / double(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    fail(ErrorCategory::parse, "scenario line " + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view text, int line, const std::string& field) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(line, "field '" + field + "': expected a number, got '" +
                             std::string(text) + "'");
    return value;
}

std::uint64_t parse_unsigned(std::string_view text, int line, const std::string& field) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(line, "field '" + field + "': expected a nonnegative integer, got '" +
                             std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    while (true) {
        const std::size_t pos = s.find(sep);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s));
            return parts;
        }
        parts.push_back(trim(s.substr(0, pos)));
        s.remove_prefix(pos + 1);
    }
}

std::vector<std::string_view> call_args(std::string_view value, std::string_view name,
                                        int line) {
    value.remove_prefix(name.size());
    value = trim(value);
    if (value.size() < 2 || value.front() != '(' || value.back() != ')')
        parse_fail(line, "field 'noise_variances': malformed " + std::string(name) +
                             "(...) call");
    return split(value.substr(1, value.size() - 2), ',');
}

std::variant<std::vector<double>, UniformGen, LogspaceGen> parse_noise(
    std::string_view value, int line) {
    if (value.front() == '[') {
        if (value.back() != ']')
            parse_fail(line, "field 'noise_variances': unterminated list");
        std::vector<double> values;
        for (std::string_view item : split(value.substr(1, value.size() - 2), ','))
            values.push_back(parse_number(item, line, "noise_variances"));
        if (values.empty())
            parse_fail(line, "field 'noise_variances': list must be nonempty");
        for (double v : values)
            if (!(v > 0.0) || !std::isfinite(v))
                parse_fail(line, "field 'noise_variances': values must be positive");
        return values;
    }
    if (value.starts_with("uniform")) {
        const auto args = call_args(value, "uniform", line);
        if (args.size() != 4)
            parse_fail(line,
                       "field 'noise_variances': uniform takes (lo, hi, n, seed)");
        UniformGen g{};
        g.lo = parse_number(args[0], line, "uniform lo");
        g.hi = parse_number(args[1], line, "uniform hi");
        g.n = parse_unsigned(args[2], line, "uniform n");
        std::string_view seed_arg = args[3];
        if (seed_arg.starts_with("seed"))
            seed_arg = trim(seed_arg.substr(seed_arg.find('=') + 1));
        g.seed = parse_unsigned(seed_arg, line, "uniform seed");
        if (!(g.lo > 0.0 && g.hi > g.lo))
            parse_fail(line, "field 'noise_variances': need 0 < lo < hi");
        if (g.n < 1) parse_fail(line, "field 'noise_variances': need n >= 1");
        return g;
    }
    if (value.starts_with("logspace")) {
        const auto args = call_args(value, "logspace", line);
        if (args.size() != 3)
            parse_fail(line, "field 'noise_variances': logspace takes (lo, hi, n)");
        LogspaceGen g{};
        g.lo = parse_number(args[0], line, "logspace lo");
        g.hi = parse_number(args[1], line, "logspace hi");
        g.n = parse_unsigned(args[2], line, "logspace n");
        if (!(g.lo > 0.0 && g.hi > g.lo))
            parse_fail(line, "field 'noise_variances': need 0 < lo < hi");
        if (g.n < 1) parse_fail(line, "field 'noise_variances': need n >= 1");
        return g;
    }
    parse_fail(line, "field 'noise_variances': expected a [list], uniform(...) or "
                     "logspace(...)");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
    ScenarioSpec spec;
    bool have_noise = false, have_alpha = false;
    int line_no = 0;

    std::string body(text);
    std::istringstream lines(body);
    std::string raw;
    while (std::getline(lines, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            parse_fail(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty())
            parse_fail(line_no, "field '" + std::string(key) + "': empty value");

        if (key == "noise_variances") {
            if (have_noise) parse_fail(line_no, "duplicate field 'noise_variances'");
            spec.noise = parse_noise(value, line_no);
            have_noise = true;
        } else if (key == "alpha") {
            if (have_alpha) parse_fail(line_no, "duplicate field 'alpha'");
            spec.alpha = parse_number(value, line_no, "alpha");
            if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
                parse_fail(line_no, "field 'alpha': must lie in (0, 1]");
            have_alpha = true;
        } else if (key == "avg_power_budget") {
            if (spec.avg_power_budget)
                parse_fail(line_no, "duplicate field 'avg_power_budget'");
            spec.avg_power_budget = parse_number(value, line_no, "avg_power_budget");
            if (!(*spec.avg_power_budget > 0.0))
                parse_fail(line_no, "field 'avg_power_budget': must be positive");
        } else if (key == "total_power_budget") {
            if (spec.total_power_budget)
                parse_fail(line_no, "duplicate field 'total_power_budget'");
            spec.total_power_budget = parse_number(value, line_no, "total_power_budget");
            if (!(*spec.total_power_budget > 0.0))
                parse_fail(line_no, "field 'total_power_budget': must be positive");
        } else {
            parse_fail(line_no, "unknown field '" + std::string(key) + "'");
        }
    }

    if (!have_noise)
        fail(ErrorCategory::parse, "scenario: missing field 'noise_variances'");
    if (!have_alpha) fail(ErrorCategory::parse, "scenario: missing field 'alpha'");
    if (spec.avg_power_budget && spec.total_power_budget)
        fail(ErrorCategory::parse,
             "scenario: fields 'avg_power_budget' and 'total_power_budget' are "
             "mutually exclusive");
    if (!spec.avg_power_budget && !spec.total_power_budget)
        fail(ErrorCategory::parse,
             "scenario: one of 'avg_power_budget' or 'total_power_budget' is required");
    return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCategory::io, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorCategory::io, "failed reading scenario file '" + path + "'");
    return parse_scenario(buf.str());
}

std::string ScenarioSpec::noise_text() const {
    struct Visitor {
        std::string operator()(const std::vector<double>& values) const {
            std::string out = "[";
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) out += ", ";
                out += fmt(values[i]);
            }
            return out + "]";
        }
        std::string operator()(const UniformGen& g) const {
            return "uniform(" + fmt(g.lo) + ", " + fmt(g.hi) + ", " +
                   std::to_string(g.n) + ", seed=" + std::to_string(g.seed) + ")";
        }
        std::string operator()(const LogspaceGen& g) const {
            return "logspace(" + fmt(g.lo) + ", " + fmt(g.hi) + ", " +
                   std::to_string(g.n) + ")";
        }
    };
    return std::visit(Visitor{}, noise);
}

std::vector<double> ScenarioSpec::materialize_noise() const {
    struct Visitor {
        std::vector<double> operator()(const std::vector<double>& values) const {
            return values;
        }
        std::vector<double> operator()(const UniformGen& g) const {
            return generate_uniform(g.lo, g.hi, g.n, g.seed);
        }
        std::vector<double> operator()(const LogspaceGen& g) const {
            return generate_logspace(g.lo, g.hi, g.n);
        }
    };
    return std::visit(Visitor{}, noise);
}

Scenario ScenarioSpec::instantiate() const {
    require(bool(avg_power_budget) != bool(total_power_budget), ErrorCategory::config,
            "scenario spec: exactly one budget field must be set");
    std::vector<double> values = materialize_noise();
    const double total = total_power_budget
                             ? *total_power_budget
                             : *avg_power_budget * double(values.size());
    return Scenario(std::move(values), total, alpha);
}

void ScenarioSpec::set_seed(std::uint64_t seed) {
    if (auto* g = std::get_if<UniformGen>(&noise)) {
        g->seed = seed;
        return;
    }
    fail(ErrorCategory::config,
         "seed override only applies to scenarios with a uniform noise generator");
}

}  // namespace ew
