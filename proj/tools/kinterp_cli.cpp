// kinterp command line: run and validate experiment configs, run the oracle suite.
//
// Exit status: 0 when every criterion passed, 1 when a criterion failed, the run was
// incomplete or a numerical error stopped it, 2 for bad usage, configs or files.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracle_suite.hpp"

namespace fs = std::filesystem;
using namespace kinterp;

namespace {

void print_summary(const ExperimentConfig& c)
{
    std::cout << "name:      " << c.name << '\n'
              << "kind:      " << kind_name(c.kind) << '\n'
              << "kernel:    " << to_string(c.kernel) << '\n'
              << "levels:   ";
    for (int l : c.levels) std::cout << ' ' << l;
    std::cout << '\n';
    if (!c.sigmas.empty()) {
        std::cout << "sigma:    ";
        for (double s : c.sigmas) std::cout << ' ' << s;
        std::cout << '\n';
    }
}

fs::path resolve(const std::string& configured, const fs::path& out_dir, const std::string& fallback)
{
    if (configured.empty()) return out_dir.empty() ? fs::path() : out_dir / fallback;
    const fs::path p(configured);
    return (p.is_relative() && !out_dir.empty()) ? out_dir / p : p;
}

int run(const std::string& path, const std::string& out_dir, bool quiet)
{
    const ExperimentConfig c = load_config(path);
    const ConvergenceReport r = run_experiment(c, quiet ? nullptr : &std::cerr);
    const fs::path dir(out_dir);
    const std::pair<ReportFormat, fs::path> outputs[] = {
        {ReportFormat::Csv, resolve(c.csv, dir, c.name + ".csv")},
        {ReportFormat::Json, resolve(c.json, dir, c.name + ".json")},
        {ReportFormat::Svg, resolve(c.svg, dir, c.name + ".svg")},
    };
    for (const auto& [format, p] : outputs)
        if (!p.empty()) emit_report(r, format, p);

    for (const auto& f : r.fits) std::cout << "fit " << f.series << " vs " << f.against << ": slope " << format_number(f.fit.slope) << '\n';
    for (const auto& f : r.failures) std::cout << "level " << f.level << " failed: " << f.error << '\n';
    for (const auto& crit : r.criteria) {
        std::cout << (crit.passed ? "PASS " : "FAIL ") << crit.id << "  " << crit.quantity << " = " << format_number(crit.value);
        if (crit.lower) std::cout << "  (>= " << format_number(*crit.lower) << ')';
        if (crit.upper) std::cout << "  (<= " << format_number(*crit.upper) << ')';
        if (!crit.note.empty()) std::cout << "  [" << crit.note << ']';
        std::cout << '\n';
    }
    if (!r.completed) std::cout << "run incomplete: fewer than 3 levels survived\n";
    return r.completed && r.all_passed() ? 0 : 1;
}

int run_oracles(const std::string& name)
{
    bool found = false, ok = true;
    for (const auto& nc : oracle::all_checks()) {
        if (name != "all" && name != nc.name) continue;
        found = true;
        const oracle::Check c = nc.run();
        ok = ok && c.passed();
        std::cout << (c.passed() ? "PASS " : "FAIL ") << std::left << std::setw(16) << c.name << " max error " << format_number(c.error)
                  << "  tolerance " << format_number(c.tolerance) << '\n';
    }
    if (!found) {
        std::cerr << "unknown oracle '" << name << "'; available: all";
        for (const auto& nc : oracle::all_checks()) std::cerr << ", " << nc.name;
        std::cerr << '\n';
        return 2;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kernel interpolation convergence experiments"};
    app.require_subcommand(1);

    std::string config, out_dir, oracle_name = "all";
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "run an experiment config and write its reports");
    run_cmd->add_option("config", config, "INI experiment config")->required();
    run_cmd->add_option("-o,--output-dir", out_dir, "directory for reports; relative output paths are placed here");
    run_cmd->add_flag("-q,--quiet", quiet, "no per-level progress on stderr");

    auto* validate_cmd = app.add_subcommand("validate", "parse and check a config without running it");
    validate_cmd->add_option("config", config, "INI experiment config")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "compare the library against independent reference computations");
    oracle_cmd->add_option("name", oracle_name, "oracle name or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) return run(config, out_dir, quiet);
        if (*validate_cmd) {
            const ExperimentConfig c = load_config(config);
            validate_config(c);
            print_summary(c);
            std::cout << "config is valid\n";
            return 0;
        }
        if (*oracle_cmd) return run_oracles(oracle_name);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const kinterp::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
