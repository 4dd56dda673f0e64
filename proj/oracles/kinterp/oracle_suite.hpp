#pragma once

// Library-versus-oracle comparisons, shared by the CLI `oracle` verb and the tests.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracles.hpp"

namespace kinterp::oracle {

struct Check {
    std::string name;
    double error = 0;  // max discrepancy found
    double tolerance = 0;
    bool passed() const { return error <= tolerance; }
};

inline Check check_matern()
{
    Check c{"matern", 0, 1e-12};
    for (double r : {0.0, 1e-3, 0.1, 0.5, 1.0, 2.5, 7.0, 30.0}) c.error = std::max(c.error, std::abs(matern_value(1.5, r) - matern_three_halves(r)));
    return c;
}

inline Check check_bessel()
{
    Check c{"bessel", 0, 1e-10};
    for (double nu : {0.3, 1.0, 1.7, 2.25})
        for (double r : {0.05, 0.5, 1.0, 3.0, 10.0}) {
            const double ref = matern(nu, r);
            c.error = std::max(c.error, std::abs(matern_value(nu, r) - ref) / std::abs(ref));
        }
    return c;
}

inline Check check_wendland()
{
    Check c{"wendland", 0, 1e-12};
    for (int k : {1, 2, 3})
        for (int ell : {2, 3, 5}) {
            c.error = std::max(c.error, std::abs(generalized_wendland_value(k, ell, 0) - generalized_wendland_at_zero(k, ell)));
            for (double r : {0.1, 0.33, 0.5, 0.8, 0.99})
                c.error = std::max(c.error, std::abs(generalized_wendland_value(k, ell, r) - generalized_wendland(k, ell, r)));
        }
    return c;
}

// Cubic surface-spline interpolation with linear polynomials is the natural cubic spline.
inline Check check_spline(int level = 5)
{
    Check c{"natural-spline", 0, 1e-7};
    const PointSet ps = generate_point_set(Box::unit(1), level, 0.2, 11);
    std::vector<double> x(ps.coords()), y;
    for (double t : x) y.push_back(std::sin(5 * t) + t * t);
    const Interpolant s = solve_interpolant(assemble_system(KernelSpec::surface_spline(1, 2), ps), y);
    std::vector<double> xs = x, ys = y;
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    const NaturalCubicSpline spline(xs, ys);
    std::vector<double> probes;
    for (int i = 0; i <= 1000; ++i) probes.push_back(i / 1000.0);
    const auto v = evaluate_interpolant(s, probes);
    for (std::size_t i = 0; i < probes.size(); ++i) c.error = std::max(c.error, std::abs(v[i] - spline(probes[i])));
    return c;
}

// Grid Sobolev norms of sin(w x) on [0.1, 0.9] against the analytic integrals.
inline Check check_sobolev()
{
    Check c{"sobolev", 0, 1e-5};
    const double w = 7.0, a = 0.1, b = 0.9;
    const GridFunction gf = sample_grid(Box({a}, {b}), {1025}, [&](std::span<const double> x) { return std::sin(w * x[0]); });
    for (int k = 0; k <= 3; ++k) {
        const double ref = std::sqrt(sin_seminorm_squared(w, k, a, b));
        c.error = std::max(c.error, std::abs(sobolev_seminorm_grid(gf, k) - ref) / ref);
    }
    return c;
}

// f = phi * nu reproduces the bump: nu built from oracle derivatives, convolved by oracle quadrature.
inline Check check_target()
{
    Check c{"target", 0, 1e-9};
    const double center = 0.5, w = 0.25;
    const int p = 12;
    const auto bump = [&](double x) { return bump_derivative(p, center, w, x, 0); };
    // |x|^3 has fourth derivative 12 delta.
    const auto nu_spline = [&](double x) { return bump_derivative(p, center, w, x, 4) / 12.0; };
    const auto phi_spline = [](double r) { return r * r * r; };
    // (1 - D^2)^2 [sqrt(pi/2)(1+|x|)e^{-|x|}] = 2 sqrt(2 pi) delta.
    const auto nu_matern = [&](double x) {
        return (bump_derivative(p, center, w, x, 0) - 2 * bump_derivative(p, center, w, x, 2) + bump_derivative(p, center, w, x, 4)) /
               (2 * std::sqrt(2 * std::numbers::pi));
    };
    const TargetFunction ts = make_target(KernelSpec::surface_spline(1, 2), CosineBump({center}, {w}, p), Box::unit(1));
    const TargetFunction tm = make_target(KernelSpec::matern(1, 2), CosineBump({center}, {w}, p), Box::unit(1));
    for (double x : {0.0, 0.2, 0.3, 0.5, 0.61, 0.75, 0.9}) {
        const double g = bump(x);
        c.error = std::max(c.error, std::abs(convolution(nu_spline, phi_spline, x, center - w, center + w) - g));
        c.error = std::max(c.error, std::abs(convolution(nu_matern, matern_three_halves, x, center - w, center + w) - g));
        c.error = std::max(c.error, std::abs(ts.value(std::span<const double>(&x, 1)) - g));
        c.error = std::max(c.error, std::abs(tm.value(std::span<const double>(&x, 1)) - g));
        c.error = std::max(c.error, std::abs(ts.density()(std::span<const double>(&x, 1)) - nu_spline(x)));
        c.error = std::max(c.error, std::abs(tm.density()(std::span<const double>(&x, 1)) - nu_matern(x)));
    }
    return c;
}

// Slopes recovered from exact power laws.
inline Check check_regression()
{
    Check c{"regression", 0, 1e-12};
    const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125, 0.00625};
    for (double p : {1.0, 2.5, 4.0}) {
        const auto e = power_law(h, 3.0, p);
        const RateFit fit = fit_convergence_rate(h, e);
        c.error = std::max(c.error, std::abs(fit.slope - p));
        c.error = std::max(c.error, std::abs(fit.slope - loglog_fit(h, e).first));
    }
    return c;
}

struct NamedCheck {
    const char* name;
    Check (*run)();
};

inline const std::vector<NamedCheck>& all_checks()
{
    static const std::vector<NamedCheck> checks = {
        {"matern", check_matern},   {"bessel", check_bessel}, {"wendland", check_wendland},     {"natural-spline", [] { return check_spline(); }},
        {"sobolev", check_sobolev}, {"target", check_target}, {"regression", check_regression},
    };
    return checks;
}

}  // namespace kinterp::oracle
