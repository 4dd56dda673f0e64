#pragma once

// Refinement-ladder experiments: points -> target -> interpolant (or quasi-interpolant, random
// trial function, eigenvalue, power function) -> grid norms -> rate fits -> pass/fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "kinterp/config.hpp"
#include "kinterp/cosine_bump.hpp"
#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/interpolate.hpp"
#include "kinterp/kernels.hpp"
#include "kinterp/native_error.hpp"
#include "kinterp/norms.hpp"
#include "kinterp/polyrepro.hpp"
#include "kinterp/quasiinterp.hpp"
#include "kinterp/report.hpp"
#include "kinterp/target.hpp"

namespace kinterp {

// Independent generator per (seed, level, stream).
inline std::mt19937_64 level_rng(std::uint64_t seed, int level, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(level), stream};
    return std::mt19937_64(seq);
}

// Uniform random points in the box, row-major.
inline std::vector<double> random_points(const Box& box, std::size_t count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts;
    pts.reserve(count * static_cast<std::size_t>(box.dim()));
    for (std::size_t i = 0; i < count; ++i)
        for (int k = 0; k < box.dim(); ++k) pts.push_back(box.lower[static_cast<std::size_t>(k)] + box.side(k) * u(rng));
    return pts;
}

inline int default_repro_degree(const KernelSpec& spec)
{
    const KernelProps p = kernel_properties(spec);
    return static_cast<int>(std::ceil(p.homogeneity - 1e-12)) + spec.dim + 1;
}

inline int default_bump_power(const KernelSpec& spec)
{
    const KernelProps p = kernel_properties(spec);
    const int op_order = 2 * static_cast<int>(std::ceil(p.native_exponent - 1e-12));
    return 2 * op_order + 2;
}

inline CosineBump config_bump(const ExperimentConfig& c)
{
    return CosineBump(c.bump_center, c.bump_half_width, c.bump_power ? c.bump_power : default_bump_power(c.kernel));
}

inline TargetFunction config_target(const ExperimentConfig& c)
{
    return make_target(c.kernel, config_bump(c), c.domain, TargetOptions{c.target_panels, c.target_order});
}

namespace detail {

// Error-grid points and target values, shared across levels with equal node counts.
class GridCache {
public:
    GridCache(const Box& region, const TargetFunction* target) : region_(region), target_(target) {}

    struct Entry {
        std::vector<std::size_t> nodes;
        std::vector<double> points;
        std::vector<double> f;
    };

    const Entry& get(std::size_t per_axis)
    {
        auto it = cache_.find(per_axis);
        if (it != cache_.end()) return it->second;
        Entry e;
        e.nodes.assign(static_cast<std::size_t>(region_.dim()), per_axis);
        e.points = grid_points(region_, e.nodes);
        if (target_) e.f = target_->values(e.points);
        return cache_.emplace(per_axis, std::move(e)).first->second;
    }

private:
    Box region_;
    const TargetFunction* target_;
    std::map<std::size_t, Entry> cache_;
};

inline std::string criterion_prefix(const ExperimentConfig& c) { return c.criterion.empty() ? c.name : c.criterion; }

inline void add_fit(ConvergenceReport& r, const std::string& series, const std::string& against, const std::vector<double>& x, const std::vector<double>& e)
{
    r.fits.push_back({series, against, fit_convergence_rate(x, e)});
}

}  // namespace detail

inline ConvergenceReport run_experiment(const ExperimentConfig& c, std::ostream* log = nullptr)
{
    validate_config(c);
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const KernelProps props = kernel_properties(c.kernel);
    const int d = c.kernel.dim;
    const double tau = props.native_exponent;

    ConvergenceReport r;
    r.name = c.name;
    r.kind = std::string(kind_name(c.kind));
    r.kernel = to_string(c.kernel);
    r.config = c.echo;
    const Box region = c.domain.shrunk(c.margin);
    auto box_text = [](const Box& b) {
        std::string s = "[";
        for (int i = 0; i < b.dim(); ++i) s += (i ? ", " : "") + format_number(b.lower[static_cast<std::size_t>(i)]) + ".." + format_number(b.upper[static_cast<std::size_t>(i)]);
        return s + "]";
    };
    r.metadata.emplace_back("domain", box_text(c.domain));
    r.metadata.emplace_back("probe_refinement", "3");

    std::optional<TargetFunction> target;
    const bool grid_kind = uses_target(c.kind) || c.kind == ExperimentKind::Bernstein;
    if (grid_kind) {
        r.metadata.emplace_back("error_region", box_text(region));
        r.metadata.emplace_back("margin", format_number(c.margin));
        r.metadata.emplace_back("oversampling", std::to_string(c.oversampling));
    }
    if (uses_target(c.kind)) {
        r.sigmas = c.sigmas;
        target = config_target(c);
        r.metadata.emplace_back("target_path", std::string(path_name(target->path())));
        r.metadata.emplace_back("bump_power", std::to_string(target->bump().power()));
        if (target->path() == TargetPath::Quadrature)
            r.metadata.emplace_back("target_quadrature", std::to_string(target->panels()) + " panels x order " + std::to_string(target->order()));
    }
    if (c.kind == ExperimentKind::QuasiRates || c.kind == ExperimentKind::PolyreproAudit) {
        r.metadata.emplace_back("degree", std::to_string(c.degree.value_or(default_repro_degree(c.kernel))));
        r.metadata.emplace_back("locality", c.locality ? format_number(*c.locality) : "auto");
    }
    if (c.kind == ExperimentKind::ERatio) r.metadata.emplace_back("native_quadrature", std::to_string(c.native_panels) + " panels x order " + std::to_string(c.native_order) + ", cut at centers");

    detail::GridCache grid(region, target ? &*target : nullptr);
    detail::GridCache full_grid(c.domain, target ? &*target : nullptr);
    const GenerateOptions gen{c.max_points, 3};

    for (int level : c.levels) {
        const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
        if (elapsed > c.max_runtime) {
            r.failures.push_back({level, "runtime budget of " + format_number(c.max_runtime) + " s exhausted before this level"});
            continue;
        }
        const auto level_start = clock::now();
        try {
            const PointSet ps = generate_point_set(c.domain, level, c.jitter, c.seed, gen);
            LevelRow row;
            row.level = level;
            row.seed = c.seed;
            row.n = ps.size();
            row.q = ps.quality()->separation;
            row.h = ps.quality()->fill;
            row.rho = ps.quality()->mesh_ratio;
            const std::size_t per_axis = error_grid_nodes(c, level);

            switch (c.kind) {
                case ExperimentKind::InterpolationRates:
                case ExperimentKind::ERatio: {
                    const SaddleSystem sys = assemble_system(c.kernel, ps);
                    const SaddleSolver solver(sys);
                    const Interpolant s = solve_interpolant(solver, target->values(ps.coords()));
                    row.condition = solver.condition_estimate();
                    row.metrics.emplace_back("solve_residual", s.residual);
                    const auto& g = grid.get(per_axis);
                    const auto sv = evaluate_interpolant(s, g.points);
                    GridFunction gf{region, g.nodes, std::vector<double>(sv.size())};
                    for (std::size_t i = 0; i < sv.size(); ++i) gf.values[i] = g.f[i] - sv[i];
                    row.errors = sobolev_norms_grid(gf, c.sigmas);
                    if (c.kind == ExperimentKind::ERatio) {
                        const auto& fg = full_grid.get(per_axis);
                        const auto fv = evaluate_interpolant(s, fg.points);
                        GridFunction full{c.domain, fg.nodes, std::vector<double>(fv.size())};
                        for (std::size_t i = 0; i < fv.size(); ++i) full.values[i] = fg.f[i] - fv[i];
                        const double l2 = sobolev_norm_grid(full, 0);
                        const QuadratureRule rule = native_error_rule(*target, ps, c.native_panels, c.native_order);
                        const NativeError ne = target_error_native(*target, s, rule);
                        row.metrics.emplace_back("l2_error", l2);
                        row.metrics.emplace_back("native_error", ne.value);
                        row.metrics.emplace_back("e_ratio", ne.value > e_ratio_floor ? l2 / ne.value : std::numeric_limits<double>::quiet_NaN());
                    }
                    break;
                }
                case ExperimentKind::QuasiRates: {
                    ReproConfig rc;
                    rc.degree = c.degree.value_or(default_repro_degree(c.kernel));
                    rc.fill = row.h;
                    if (c.locality) {
                        rc.locality = *c.locality;
                    } else {
                        ReproConfig finest = rc;
                        finest.locality = locality_candidates[0];
                        const QuadratureRule probe_rule = quasi_rule(target->density(), finest, c.quad_order);
                        rc.locality = choose_locality(ps, rc, probe_rule.nodes);
                    }
                    const QuadratureRule rule = quasi_rule(target->density(), rc, c.quad_order);
                    const QuasiCoefficients qc = quasi_coefficients(*target, ps, rc, rule);
                    const MomentCertificate cert = moment_certificate(qc, ps, *target);
                    row.metrics.emplace_back("degree", rc.degree);
                    row.metrics.emplace_back("locality", rc.locality);
                    row.metrics.emplace_back("quadrature_nodes", static_cast<double>(qc.nodes));
                    row.metrics.emplace_back("gamma", qc.gamma);
                    row.metrics.emplace_back("moment_residual", cert.max_residual);
                    row.metrics.emplace_back("moment_bound", cert.bound);
                    const auto& g = grid.get(per_axis);
                    const auto tv = evaluate_quasi_interpolant(c.kernel, ps, qc.a, g.points);
                    GridFunction gf{region, g.nodes, std::vector<double>(tv.size())};
                    for (std::size_t i = 0; i < tv.size(); ++i) gf.values[i] = g.f[i] - tv[i];
                    row.errors = sobolev_norms_grid(gf, c.sigmas);
                    break;
                }
                case ExperimentKind::Bernstein: {
                    const SaddleSystem sys = assemble_system(c.kernel, ps);
                    Eigen::MatrixXd z;
                    if (sys.poly_size() > 0) z = null_space_of_transpose(sys.poly);
                    auto rng = level_rng(c.seed, level, 1);
                    std::normal_distribution<double> normal(0.0, 1.0);
                    const auto& g = grid.get(per_axis);
                    const double orders[] = {tau, tau + c.s_prime};
                    double max_ratio = 0;
                    for (int sample = 0; sample < c.samples; ++sample) {
                        Eigen::VectorXd a(static_cast<Eigen::Index>(ps.size()));
                        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = normal(rng);
                        if (z.size() > 0) a = z * (z.transpose() * a);
                        const auto uv = evaluate_kernel_expansion(c.kernel, ps, {a.data(), static_cast<std::size_t>(a.size())}, nullptr, {}, g.points);
                        const GridFunction gf{region, g.nodes, uv};
                        const auto norms = sobolev_norms_grid(gf, orders);
                        max_ratio = std::max(max_ratio, norms[1] / norms[0]);
                    }
                    row.metrics.emplace_back("max_ratio", max_ratio);
                    break;
                }
                case ExperimentKind::Eigmin: {
                    const SaddleSystem sys = assemble_system(c.kernel, ps);
                    row.condition = SaddleSolver(sys).condition_estimate();
                    row.metrics.emplace_back("lambda_min", constrained_min_eigenvalue(sys));
                    break;
                }
                case ExperimentKind::PowerFunction: {
                    const SaddleSystem sys = assemble_system(c.kernel, ps);
                    const PowerFunction pf(sys);
                    row.condition = pf.condition_estimate();
                    auto rng = level_rng(c.seed, level, 2);
                    const auto probes = random_points(c.domain, c.probes, rng);
                    double pmax = 0;
                    for (std::size_t i = 0; i < c.probes; ++i)
                        pmax = std::max(pmax, pf({probes.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)}));
                    row.metrics.emplace_back("power_max", pmax);
                    break;
                }
                case ExperimentKind::PolyreproAudit: {
                    ReproConfig rc;
                    rc.degree = c.degree.value_or(default_repro_degree(c.kernel));
                    rc.fill = row.h;
                    auto rng = level_rng(c.seed, level, 3);
                    const auto probes = random_points(c.domain, c.probes, rng);
                    rc.locality = c.locality ? *c.locality : choose_locality(ps, rc, probes);
                    const auto audit = audit_reproduction(ps, rc, probes);
                    double gamma = 0, residual = 0, defect = 0;
                    std::size_t min_stencil = std::numeric_limits<std::size_t>::max();
                    for (const auto& a : audit) {
                        gamma = std::max(gamma, a.lebesgue);
                        residual = std::max(residual, a.residual);
                        defect = std::max(defect, a.constant_defect);
                        min_stencil = std::min(min_stencil, a.stencil_size);
                    }
                    row.metrics.emplace_back("degree", rc.degree);
                    row.metrics.emplace_back("locality", rc.locality);
                    row.metrics.emplace_back("gamma", gamma);
                    row.metrics.emplace_back("max_residual", residual);
                    row.metrics.emplace_back("max_constant_defect", defect);
                    row.metrics.emplace_back("min_stencil", static_cast<double>(min_stencil));
                    break;
                }
            }
            r.rows.push_back(std::move(row));
            if (log) {
                const double secs = std::chrono::duration<double>(clock::now() - level_start).count();
                *log << "  level " << level << ": n=" << r.rows.back().n << " h=" << format_number(r.rows.back().h) << " (" << secs << " s)\n";
            }
        } catch (const error& e) {
            r.failures.push_back({level, e.what()});
            if (log) *log << "  level " << level << " failed: " << e.what() << '\n';
        }
    }

    const std::string id = detail::criterion_prefix(c);
    std::vector<double> hs, qs;
    for (const auto& row : r.rows) {
        hs.push_back(row.h);
        qs.push_back(row.q);
    }
    auto metric_series = [&](const std::string& name) {
        std::vector<double> v;
        for (const auto& row : r.rows) v.push_back(row.metric(name).value_or(std::numeric_limits<double>::quiet_NaN()));
        return v;
    };

    try {
        switch (c.kind) {
            case ExperimentKind::InterpolationRates:
            case ExperimentKind::QuasiRates:
            case ExperimentKind::ERatio: {
                const double base = c.rate_base.value_or(2 * tau);
                for (std::size_t k = 0; k < c.sigmas.size(); ++k) {
                    std::vector<double> e;
                    for (const auto& row : r.rows) e.push_back(row.errors[k]);
                    detail::add_fit(r, sigma_label(c.sigmas[k]), "h", hs, e);
                    if (c.kind != ExperimentKind::ERatio)
                        r.criteria.push_back(make_criterion(id + "/" + sigma_label(c.sigmas[k]), "slope of the W2^sigma error vs h", r.fits.back().fit.slope,
                                                            base - c.sigmas[k] - c.rate_tolerance, std::nullopt));
                }
                if (c.kind == ExperimentKind::QuasiRates) {
                    double worst = 0;
                    for (const auto& row : r.rows) worst = std::max(worst, *row.metric("moment_residual") / *row.metric("moment_bound"));
                    r.criteria.push_back(make_criterion(id + "/moments", "max moment residual / bound", worst, std::nullopt, 1.0));
                }
                if (c.kind == ExperimentKind::ERatio) {
                    detail::add_fit(r, "e_ratio", "h", hs, metric_series("e_ratio"));
                    r.criteria.push_back(make_criterion(id + "/e_ratio", "slope of the L2 / native error ratio vs h", r.fits.back().fit.slope,
                                                        c.slope_min.value_or(tau - 0.4), c.slope_max));
                }
                break;
            }
            case ExperimentKind::Bernstein: {
                detail::add_fit(r, "max_ratio", "q", qs, metric_series("max_ratio"));
                const double exponent = -r.fits.back().fit.slope;
                r.criteria.push_back(make_criterion(id + "/exponent", "exponent of the max norm ratio vs q (negated slope)", exponent, c.slope_min,
                                                    c.slope_max.value_or(c.s_prime + 0.3)));
                break;
            }
            case ExperimentKind::Eigmin: {
                const double expected = 2 * tau - d;
                const auto lam = metric_series("lambda_min");
                detail::add_fit(r, "lambda_min", "q", qs, lam);
                r.criteria.push_back(make_criterion(id + "/slope", "slope of lambda_min vs q", r.fits.back().fit.slope, c.slope_min.value_or(expected - 0.4),
                                                    c.slope_max.value_or(expected + 0.6)));
                const double c0 = lam.front() / std::pow(qs.front(), expected);
                double worst = INFINITY;
                for (std::size_t i = 0; i < lam.size(); ++i) worst = std::min(worst, lam[i] / (c0 * std::pow(qs[i], expected)));
                r.criteria.push_back(make_criterion(id + "/calibrated_bound", "min over levels of lambda_min / (c q^" + format_number(expected) + "), c from the coarsest level",
                                                    worst, 1.0, std::nullopt));
                break;
            }
            case ExperimentKind::PowerFunction: {
                detail::add_fit(r, "power_max", "h", hs, metric_series("power_max"));
                r.criteria.push_back(make_criterion(id + "/slope", "slope of max power function vs h", r.fits.back().fit.slope,
                                                    c.slope_min.value_or(tau - 0.5 * d - 0.3), c.slope_max));
                break;
            }
            case ExperimentKind::PolyreproAudit: {
                if (r.rows.empty()) throw insufficient_data_error("no level completed");
                double residual = 0, defect = 0, gamma = 0;
                for (const auto& row : r.rows) {
                    residual = std::max(residual, *row.metric("max_residual"));
                    defect = std::max(defect, *row.metric("max_constant_defect"));
                    gamma = std::max(gamma, *row.metric("gamma"));
                }
                r.criteria.push_back(make_criterion(id + "/residual", "max reproduction residual", residual, std::nullopt, c.residual_tolerance));
                r.criteria.push_back(make_criterion(id + "/constants", "max |sum a - 1|", defect, std::nullopt, 1e-10));
                r.criteria.push_back(make_criterion(id + "/gamma", "max sum |a|", gamma, std::nullopt, c.gamma_bound));
                break;
            }
        }
    } catch (const insufficient_data_error& e) {
        r.completed = false;
        r.criteria.push_back(make_criterion(id + "/levels", "surviving levels", static_cast<double>(r.rows.size()), 3.0, std::nullopt, e.what()));
    }
    if (!r.failures.empty()) {
        for (auto& crit : r.criteria)
            if (crit.note.empty()) crit.note = std::to_string(r.failures.size()) + " level(s) failed and were excluded";
    }
    return r;
}

}  // namespace kinterp
