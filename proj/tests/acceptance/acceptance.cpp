// Runs the shipped acceptance experiments and prints one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracles.hpp"

using namespace kinterp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = true;
    std::vector<std::string> lines;

    void add(bool ok, const std::string& what)
    {
        passed = passed && ok;
        lines.push_back(std::string(ok ? "  ok    " : "  FAIL  ") + what);
    }
};

std::string config_path(const std::string& stem) { return std::string(KINTERP_CONFIG_DIR) + "/" + stem + ".ini"; }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
    ExperimentConfig config;
    ConvergenceReport report;
    double seconds = 0;
};

Run run(const std::string& stem, const fs::path& out)
{
    Run r;
    r.config = load_config(config_path(stem));
    const auto t0 = std::chrono::steady_clock::now();
    r.report = run_experiment(r.config);
    r.seconds = seconds_since(t0);
    emit_report(r.report, ReportFormat::Json, out / (stem + ".json"));
    emit_report(r.report, ReportFormat::Csv, out / (stem + ".csv"));
    emit_report(r.report, ReportFormat::Svg, out / (stem + ".svg"));
    return r;
}

void add_report(Outcome& o, const Run& r, double budget)
{
    for (const auto& c : r.report.criteria) {
        std::string bounds;
        if (c.lower) bounds += " >= " + format_number(*c.lower);
        if (c.upper) bounds += (bounds.empty() ? " <= " : ", <= ") + format_number(*c.upper);
        o.add(c.passed, c.id + ": " + c.quantity + " = " + format_number(c.value) + bounds);
    }
    for (const auto& f : r.report.failures) o.add(false, "level " + std::to_string(f.level) + ": " + f.error);
    o.add(r.report.completed, "all levels completed");
    char buf[96];
    std::snprintf(buf, sizeof buf, "runtime %.1f s <= %g s", r.seconds, budget);
    o.add(r.seconds <= budget, buf);
}

Interpolant interpolate(const ExperimentConfig& c, const TargetFunction& t, const PointSet& ps)
{
    return solve_interpolant(assemble_system(c.kernel, ps), t.values(ps.coords()));
}

// Cubic surface-spline interpolation with linear polynomials is the natural cubic spline
// through the same data.
void natural_spline_agreement(Outcome& o, const Run& r)
{
    const TargetFunction t = config_target(r.config);
    for (int level : r.config.levels) {
        const PointSet ps = generate_point_set(r.config.domain, level, r.config.jitter, r.config.seed);
        const Interpolant s = interpolate(r.config, t, ps);
        std::vector<double> x(ps.coords());
        std::sort(x.begin(), x.end());
        const oracle::NaturalCubicSpline spline(x, t.values(x));
        const auto probes = oracle::linspace(r.config.domain.lower[0], r.config.domain.upper[0], 4000);
        const auto v = evaluate_interpolant(s, probes);
        double worst = 0;
        for (std::size_t i = 0; i < probes.size(); ++i) worst = std::max(worst, std::abs(v[i] - spline(probes[i])));
        char buf[128];
        std::snprintf(buf, sizeof buf, "level %d: max |s - natural spline| = %.3g <= 1e-7", level, worst);
        o.add(worst <= 1e-7, buf);
    }
}

void interpolation_conditions(Outcome& o, const std::string& stem, int level)
{
    const ExperimentConfig c = load_config(config_path(stem));
    const TargetFunction t = config_target(c);
    const PointSet ps = generate_point_set(c.domain, level, c.jitter, c.seed);
    const auto f = t.values(ps.coords());
    const Interpolant s = interpolate(c, t, ps);
    const auto v = evaluate_interpolant(s, ps.coords());
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        worst = std::max(worst, std::abs(v[i] - f[i]));
        scale = std::max(scale, std::abs(f[i]));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s level %d: max |s(xi) - f(xi)| / max |f| = %.3g <= 1e-8", stem.c_str(), level, worst / scale);
    o.add(worst <= 1e-8 * scale, buf);

    // The power function vanishes on the centers.
    const SaddleSystem sys = assemble_system(c.kernel, ps);
    const PowerFunction p(sys);
    double pmax = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) pmax = std::max(pmax, p(ps.point(i)));
    std::snprintf(buf, sizeof buf, "%s level %d: max P(xi) = %.3g <= 1e-7", stem.c_str(), level, pmax);
    o.add(pmax <= 1e-7, buf);
}

void pythagoras(Outcome& o, const Run& ac1, int level)
{
    const TargetFunction t = config_target(ac1.config);
    const PointSet ps = generate_point_set(ac1.config.domain, level, ac1.config.jitter, ac1.config.seed);
    const Interpolant s = interpolate(ac1.config, t, ps);
    const NativeError e = target_error_native(t, s, native_error_rule(t, ps));
    const double lhs = e.target_norm2;
    const double rhs = std::pow(native_seminorm_discrete(s), 2) + e.inner;
    const double rel = std::abs(lhs - rhs) / lhs;
    char buf[160];
    std::snprintf(buf, sizeof buf, "n=%zu: | |f|^2 - |s|^2 - |f-s|^2 | / |f|^2 = %.3g <= 1e-4", ps.size(), rel);
    o.add(rel <= 1e-4, buf);
}

void moment_certificates(Outcome& o, const Run& ac3)
{
    for (const auto& row : ac3.report.rows) {
        const double res = row.metric("moment_residual").value_or(NAN), bound = row.metric("moment_bound").value_or(NAN);
        char buf[128];
        std::snprintf(buf, sizeof buf, "AC3 level %d: moment residual %.3g <= %.3g", row.level, res, bound);
        o.add(res <= bound, buf);
    }
}

void determinism(Outcome& o, const std::vector<const Run*>& runs)
{
    for (const Run* r : runs) {
        const std::string again = to_json(run_experiment(r->config)).dump(2);
        o.add(again == to_json(r->report).dump(2), r->config.name + ": rerun JSON byte-identical");
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kinterp acceptance runner"};
    std::string out_dir = "acceptance";
    app.add_option("-o,--output-dir", out_dir, "directory for the reports");
    CLI11_PARSE(app, argc, argv);
    const fs::path out(out_dir);

    std::map<std::string, Outcome> outcomes;
    const auto guarded = [&](const std::string& id, auto&& body) {
        try {
            body(outcomes[id]);
        } catch (const std::exception& e) {
            outcomes[id].add(false, std::string("error: ") + e.what());
        }
    };

    std::map<std::string, Run> runs;
    const std::pair<const char*, double> plan[] = {{"ac1", 120}, {"ac2", 120}, {"ac3", 300}, {"ac4", 120},
                                                   {"ac5", 60},  {"ac6", 60},  {"ac7", 120}, {"ac8", 300}};
    for (const auto& [stem, budget] : plan) {
        std::string id = stem;
        for (char& ch : id) ch = static_cast<char>(std::toupper(ch));
        guarded(id, [&](Outcome& o) {
            runs[stem] = run(stem, out);
            add_report(o, runs[stem], budget);
            if (id == "AC2") natural_spline_agreement(o, runs[stem]);
        });
        std::cout << id << " finished in " << (runs.count(stem) ? runs[stem].seconds : 0.0) << " s" << std::endl;
    }

    const auto t9 = std::chrono::steady_clock::now();
    guarded("AC9", [&](Outcome& o) {
        const Run audit = run("ac9_polyrepro", out);
        add_report(o, audit, 60);
        for (const auto& [stem, level] : {std::pair{"ac1", 6}, {"ac2", 6}, {"ac8", 4}}) interpolation_conditions(o, stem, level);
        if (runs.count("ac3")) moment_certificates(o, runs["ac3"]);
        else o.add(false, "AC3 did not run; no moment certificates");
        if (runs.count("ac1")) pythagoras(o, runs["ac1"], 6);
        else o.add(false, "AC1 did not run; no Pythagoras instance");
        std::vector<const Run*> cheap;
        for (const char* s : {"ac4", "ac5", "ac6"})
            if (runs.count(s)) cheap.push_back(&runs[s]);
        determinism(o, cheap);
    });
    const double s9 = seconds_since(t9);
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "suite runtime %.1f s <= 60 s", s9);
        outcomes["AC9"].add(s9 <= 60, buf);
    }

    bool all = true;
    for (const auto& [id, o] : outcomes) {
        std::cout << "\n" << id << "\n";
        for (const auto& l : o.lines) std::cout << l << "\n";
    }
    std::cout << "\n";
    for (const auto& [id, o] : outcomes) {
        std::cout << (o.passed ? "PASS " : "FAIL ") << id << "\n";
        all = all && o.passed;
    }
    return all ? 0 : 1;
}
