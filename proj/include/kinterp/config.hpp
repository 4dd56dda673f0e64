#pragma once

// Experiment configuration: INI-style text with [section] headers and `key = value` lines.
// '#' and ';' start comments. Unknown sections or keys are errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/kernels.hpp"

namespace kinterp {

enum class ExperimentKind { InterpolationRates, QuasiRates, Bernstein, Eigmin, PowerFunction, PolyreproAudit, ERatio };

inline std::string_view kind_name(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::InterpolationRates: return "interpolation-rates";
        case ExperimentKind::QuasiRates: return "quasi-rates";
        case ExperimentKind::Bernstein: return "bernstein";
        case ExperimentKind::Eigmin: return "eigmin";
        case ExperimentKind::PowerFunction: return "power-function";
        case ExperimentKind::PolyreproAudit: return "polyrepro-audit";
        case ExperimentKind::ERatio: return "e-ratio";
    }
    return "unknown";
}

inline ExperimentKind parse_kind(std::string_view s)
{
    for (auto k : {ExperimentKind::InterpolationRates, ExperimentKind::QuasiRates, ExperimentKind::Bernstein, ExperimentKind::Eigmin,
                   ExperimentKind::PowerFunction, ExperimentKind::PolyreproAudit, ExperimentKind::ERatio})
        if (kind_name(k) == s) return k;
    throw config_error("unknown experiment kind '" + std::string(s) + "'");
}

// Sections in file order, keys in file order.
using IniSection = std::pair<std::string, std::vector<std::pair<std::string, std::string>>>;
using IniDocument = std::vector<IniSection>;

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline IniDocument parse_ini(std::istream& is)
{
    IniDocument doc;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw config_error("line " + std::to_string(lineno) + ": malformed section header");
            const std::string name = trim(std::string_view(t).substr(1, t.size() - 2));
            for (const auto& s : doc)
                if (s.first == name) throw config_error("line " + std::to_string(lineno) + ": section [" + name + "] repeated");
            doc.push_back({name, {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        if (doc.empty()) throw config_error("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        for (const auto& kv : doc.back().second)
            if (kv.first == key) throw config_error("line " + std::to_string(lineno) + ": key '" + key + "' repeated");
        doc.back().second.emplace_back(key, value);
    }
    return doc;
}

struct ExperimentConfig {
    std::string name = "experiment";
    std::string criterion = "";  // acceptance criterion ID carried by every pass/fail entry
    ExperimentKind kind = ExperimentKind::InterpolationRates;
    KernelSpec kernel;
    Box domain = Box::unit(1);

    std::vector<int> levels;
    double jitter = 0;
    std::uint64_t seed = 0;
    std::size_t max_points = 5000;

    std::vector<double> bump_center;      // defaults to the domain center
    std::vector<double> bump_half_width;  // defaults to a quarter of each side
    int bump_power = 0;                   // 0: 2 * (operator order) + 2
    std::size_t target_panels = 32;
    int target_order = 8;

    std::vector<double> sigmas;
    std::size_t grid_nodes = 0;  // minimum per axis; 0: 513 in 1-d, 257 otherwise
    int oversampling = 8;        // grid nodes per axis >= oversampling * (centers per axis - 1) + 1
    double margin = 0.0234375;
    std::size_t max_grid_nodes = 2'000'000;

    std::size_t native_panels = 32;
    int native_order = 12;

    std::optional<int> degree;       // L
    std::optional<double> locality;  // K; unset: chosen from {2, 3, 4, 6, 8, 12}
    int quad_order = 12;

    int samples = 20;
    double s_prime = 1;
    std::size_t probes = 200;

    std::optional<double> rate_base;  // expected slope at sigma = 0; default 2 tau
    double rate_tolerance = 0.4;
    std::optional<double> slope_min;
    std::optional<double> slope_max;
    double gamma_bound = 5;
    double residual_tolerance = 1e-9;
    double max_runtime = 300;

    std::string csv, json, svg;

    IniDocument echo;  // the parsed document, reproduced in reports
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': '" + v + "' is not a number");
    }
    if (pos != v.size() || !std::isfinite(x)) throw config_error("key '" + key + "': '" + v + "' is not a finite number");
    return x;
}

inline long long parse_integer(const std::string& key, const std::string& v)
{
    const double x = parse_double(key, v);
    if (x != std::round(x) || std::abs(x) > 9e15) throw config_error("key '" + key + "': '" + v + "' is not an integer");
    return static_cast<long long>(x);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(parse_double(key, tok));
    return out;
}

inline std::vector<double> broadcast(const std::string& key, std::vector<double> v, int d)
{
    if (v.size() == 1 && d > 1) v.assign(static_cast<std::size_t>(d), v.front());
    if (static_cast<int>(v.size()) != d) throw config_error("key '" + key + "' needs 1 or d = " + std::to_string(d) + " values");
    return v;
}

}  // namespace detail

inline ExperimentConfig parse_config(const IniDocument& doc)
{
    ExperimentConfig c;
    c.echo = doc;
    auto find = [&](const std::string& sec, const std::string& key) -> const std::string* {
        for (const auto& s : doc)
            if (s.first == sec)
                for (const auto& kv : s.second)
                    if (kv.first == key) return &kv.second;
        return nullptr;
    };
    static const std::vector<std::pair<std::string, std::set<std::string>>> known = {
        {"experiment", {"kind", "name", "criterion", "probes", "samples", "s_prime"}},
        {"kernel", {"family", "d", "m", "tau", "k", "ell"}},
        {"domain", {"lower", "upper"}},
        {"points", {"levels", "jitter", "seed", "max_points"}},
        {"target", {"center", "half_width", "power", "panels", "order"}},
        {"norms", {"sigma", "grid_nodes", "oversampling", "margin", "max_grid_nodes"}},
        {"native", {"panels", "order"}},
        {"repro", {"degree", "locality", "order"}},
        {"criteria", {"rate_base", "rate_tolerance", "slope_min", "slope_max", "gamma_bound", "residual_tolerance"}},
        {"budget", {"max_runtime"}},
        {"output", {"csv", "json", "svg"}},
    };
    for (const auto& s : doc) {
        auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == s.first; });
        if (it == known.end()) throw config_error("unknown section [" + s.first + "]");
        for (const auto& kv : s.second)
            if (!it->second.count(kv.first)) throw config_error("unknown key '" + kv.first + "' in section [" + s.first + "]");
    }
    using detail::parse_double;
    using detail::parse_integer;
    using detail::parse_list;
    auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
        if (const auto* v = find(sec, key)) return *v;
        return std::nullopt;
    };
    auto require = [&](const std::string& sec, const std::string& key) {
        auto v = get(sec, key);
        if (!v) throw config_error("missing key '" + key + "' in section [" + sec + "]");
        return *v;
    };

    c.kind = parse_kind(require("experiment", "kind"));
    if (auto v = get("experiment", "name")) c.name = *v;
    if (auto v = get("experiment", "criterion")) c.criterion = *v;
    if (auto v = get("experiment", "probes")) c.probes = static_cast<std::size_t>(parse_integer("probes", *v));
    if (auto v = get("experiment", "samples")) c.samples = static_cast<int>(parse_integer("samples", *v));
    if (auto v = get("experiment", "s_prime")) c.s_prime = parse_double("s_prime", *v);

    std::ostringstream spec;
    spec << require("kernel", "family") << " d=" << require("kernel", "d");
    for (const char* key : {"m", "tau", "k", "ell"})
        if (auto v = get("kernel", key)) spec << ' ' << key << '=' << *v;
    try {
        c.kernel = parse_kernel_spec(spec.str());
    } catch (const parameter_error& e) {
        throw config_error(std::string("[kernel]: ") + e.what());
    }
    const int d = c.kernel.dim;

    std::vector<double> lo(static_cast<std::size_t>(d), 0.0), hi(static_cast<std::size_t>(d), 1.0);
    if (auto v = get("domain", "lower")) lo = detail::broadcast("lower", parse_list("lower", *v), d);
    if (auto v = get("domain", "upper")) hi = detail::broadcast("upper", parse_list("upper", *v), d);
    try {
        c.domain = Box(lo, hi);
    } catch (const domain_error& e) {
        throw config_error(std::string("[domain]: ") + e.what());
    }

    for (double l : parse_list("levels", require("points", "levels"))) {
        if (l != std::round(l) || l < 0) throw config_error("levels must be nonnegative integers");
        c.levels.push_back(static_cast<int>(l));
    }
    if (auto v = get("points", "jitter")) c.jitter = parse_double("jitter", *v);
    if (auto v = get("points", "seed")) {
        const long long s = parse_integer("seed", *v);
        if (s < 0) throw config_error("seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = get("points", "max_points")) c.max_points = static_cast<std::size_t>(parse_integer("max_points", *v));

    c.bump_center.assign(static_cast<std::size_t>(d), 0.0);
    c.bump_half_width.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        c.bump_center[static_cast<std::size_t>(i)] = c.domain.center(i);
        c.bump_half_width[static_cast<std::size_t>(i)] = 0.25 * c.domain.side(i);
    }
    if (auto v = get("target", "center")) c.bump_center = detail::broadcast("center", parse_list("center", *v), d);
    if (auto v = get("target", "half_width")) c.bump_half_width = detail::broadcast("half_width", parse_list("half_width", *v), d);
    if (auto v = get("target", "power")) c.bump_power = static_cast<int>(parse_integer("power", *v));
    if (auto v = get("target", "panels")) c.target_panels = static_cast<std::size_t>(parse_integer("panels", *v));
    if (auto v = get("target", "order")) c.target_order = static_cast<int>(parse_integer("order", *v));

    if (auto v = get("norms", "sigma")) c.sigmas = parse_list("sigma", *v);
    if (auto v = get("norms", "grid_nodes")) c.grid_nodes = static_cast<std::size_t>(parse_integer("grid_nodes", *v));
    if (auto v = get("norms", "oversampling")) c.oversampling = static_cast<int>(parse_integer("oversampling", *v));
    if (auto v = get("norms", "margin")) c.margin = parse_double("margin", *v);
    if (auto v = get("norms", "max_grid_nodes")) c.max_grid_nodes = static_cast<std::size_t>(parse_integer("max_grid_nodes", *v));

    if (auto v = get("native", "panels")) c.native_panels = static_cast<std::size_t>(parse_integer("panels", *v));
    if (auto v = get("native", "order")) c.native_order = static_cast<int>(parse_integer("order", *v));

    if (auto v = get("repro", "degree")) c.degree = static_cast<int>(parse_integer("degree", *v));
    if (auto v = get("repro", "locality"); v && *v != "auto") c.locality = parse_double("locality", *v);
    if (auto v = get("repro", "order")) c.quad_order = static_cast<int>(parse_integer("order", *v));

    if (auto v = get("criteria", "rate_base")) c.rate_base = parse_double("rate_base", *v);
    if (auto v = get("criteria", "rate_tolerance")) c.rate_tolerance = parse_double("rate_tolerance", *v);
    if (auto v = get("criteria", "slope_min")) c.slope_min = parse_double("slope_min", *v);
    if (auto v = get("criteria", "slope_max")) c.slope_max = parse_double("slope_max", *v);
    if (auto v = get("criteria", "gamma_bound")) c.gamma_bound = parse_double("gamma_bound", *v);
    if (auto v = get("criteria", "residual_tolerance")) c.residual_tolerance = parse_double("residual_tolerance", *v);
    if (auto v = get("budget", "max_runtime")) c.max_runtime = parse_double("max_runtime", *v);

    if (auto v = get("output", "csv")) c.csv = *v;
    if (auto v = get("output", "json")) c.json = *v;
    if (auto v = get("output", "svg")) c.svg = *v;
    return c;
}

inline bool uses_target(ExperimentKind k)
{
    return k == ExperimentKind::InterpolationRates || k == ExperimentKind::QuasiRates || k == ExperimentKind::ERatio;
}

inline bool uses_sigma_window(ExperimentKind k) { return uses_target(k); }

inline std::size_t centers_per_axis(int level) { return (std::size_t{1} << level) + 1; }

// Error-grid nodes per axis at a level.
inline std::size_t error_grid_nodes(const ExperimentConfig& c, int level)
{
    const std::size_t base = c.grid_nodes ? c.grid_nodes : (c.kernel.dim == 1 ? 513 : 257);
    return std::max(base, static_cast<std::size_t>(c.oversampling) * (centers_per_axis(level) - 1) + 1);
}

// Checks everything that can be checked before computing: ranges, budgets and the admissible
// window ceil(sigma) < 2 tau - d/2 for the rate experiments.
inline void validate_config(const ExperimentConfig& c)
{
    const KernelProps props = kernel_properties(c.kernel);
    const int d = c.kernel.dim;
    if (c.levels.empty()) throw config_error("[points] levels is empty");
    for (std::size_t i = 1; i < c.levels.size(); ++i)
        if (c.levels[i] <= c.levels[i - 1]) throw config_error("[points] levels must be strictly increasing");
    if (!(c.jitter >= 0 && c.jitter < 0.5)) throw config_error("[points] jitter must lie in [0, 0.5)");
    if (c.max_points > 5000) throw config_error("[points] max_points cannot exceed the budget of 5000");
    for (int l : c.levels)
        if (std::pow(static_cast<double>(centers_per_axis(l)), d) > static_cast<double>(c.max_points))
            throw config_error("level " + std::to_string(l) + " exceeds the point budget of " + std::to_string(c.max_points));
    if (c.max_grid_nodes > 2'000'000) throw config_error("[norms] max_grid_nodes cannot exceed the budget of 2000000");
    if (c.oversampling < 1) throw config_error("[norms] oversampling must be positive");
    if (!(c.margin >= 0)) throw config_error("[norms] margin must be nonnegative");
    for (int i = 0; i < d; ++i)
        if (!(2 * c.margin < c.domain.side(i))) throw config_error("[norms] margin leaves no error region");
    for (double s : c.sigmas)
        if (!(s >= 0)) throw config_error("[norms] sigma values must be nonnegative");
    if (!(c.max_runtime > 0)) throw config_error("[budget] max_runtime must be positive");
    if (c.target_panels < 1 || c.target_order < 1 || c.native_panels < 1 || c.native_order < 1 || c.quad_order < 1)
        throw config_error("quadrature panels and orders must be positive");
    if (c.degree && *c.degree < 0) throw config_error("[repro] degree must be nonnegative");
    if (c.locality && !(*c.locality > 0)) throw config_error("[repro] locality must be positive");

    const bool needs_grid = uses_target(c.kind) || c.kind == ExperimentKind::Bernstein;
    if (needs_grid) {
        const double nodes = std::pow(static_cast<double>(error_grid_nodes(c, c.levels.back())), d);
        if (nodes > static_cast<double>(c.max_grid_nodes))
            throw config_error("error grid of " + std::to_string(static_cast<long long>(nodes)) + " nodes exceeds the budget of " +
                               std::to_string(c.max_grid_nodes));
    }
    if (uses_sigma_window(c.kind)) {
        const double window = 2 * props.native_exponent - 0.5 * d;
        for (double s : c.sigmas)
            if (std::ceil(s) >= window)
                throw config_error("sigma = " + std::to_string(s) + " is outside the admissible window ceil(sigma) < 2 tau - d/2 = " +
                                   std::to_string(window) + " for this kernel");
    }
    if (c.kind == ExperimentKind::Bernstein) {
        if (c.samples < 1) throw config_error("[experiment] samples must be positive");
        if (!(c.s_prime > 0 && c.s_prime < props.native_exponent - 0.5 * d))
            throw config_error("[experiment] s_prime must satisfy 0 < s' < tau - d/2");
    }
    if (c.kind == ExperimentKind::PowerFunction || c.kind == ExperimentKind::PolyreproAudit)
        if (c.probes < 1) throw config_error("[experiment] probes must be positive");
    const bool rate_kind = c.kind != ExperimentKind::PolyreproAudit;
    if (rate_kind && c.levels.size() < 3) throw config_error("rate experiments need at least 3 levels");
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config '" + path + "'");
    try {
        return parse_config(parse_ini(in));
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

}  // namespace kinterp
