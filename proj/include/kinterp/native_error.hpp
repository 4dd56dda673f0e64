#pragma once

// Native-space error of an interpolant to a target f = phi * nu + p. For u in the native space
// <f, u>_N = int nu u, so |f - I f|_N^2 = <f, f - I f>_N = int nu (f - I f).

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/interpolate.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/quadrature.hpp"
#include "kinterp/target.hpp"

namespace kinterp {

// Panels over supp nu cut at every center coordinate inside the support, so each panel sees
// a smooth integrand.
inline QuadratureRule native_error_rule(const TargetFunction& target, const PointSet& centers, std::size_t panels = 32, int order = 12)
{
    const Box box = target.density().support();
    std::vector<PanelRule1D> axes;
    const auto d = static_cast<std::size_t>(box.dim());
    for (std::size_t k = 0; k < d; ++k) {
        std::set<double> cuts;
        for (std::size_t i = 0; i < centers.size(); ++i) cuts.insert(centers.point(i)[k]);
        const std::vector<double> cut_list(cuts.begin(), cuts.end());
        axes.push_back(panel_rule(breakpoints_with_cuts(box.lower[k], box.upper[k], panels, cut_list, 1e-12 * box.side(static_cast<int>(k))), order));
    }
    return tensor_rule(std::move(axes));
}

struct NativeError {
    double value = 0;         // |f - I f|_N
    double inner = 0;         // int nu (f - I f) before the square root
    double target_norm2 = 0;  // |f|_N^2 = int nu f
    int order = 0;
    std::size_t panels = 0;
};

inline constexpr double native_error_relative_floor = 1e-6;

inline NativeError target_error_native(const TargetFunction& target, const Interpolant& s, const QuadratureRule& quad)
{
    const SourceDensity& nu = target.density();
    std::vector<double> pts;
    std::vector<double> w;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const double v = nu(quad.node(j));
        if (v == 0) continue;
        pts.insert(pts.end(), quad.node(j).begin(), quad.node(j).end());
        w.push_back(v * quad.weights[j]);
    }
    const auto sv = evaluate_interpolant(s, pts);
    const auto d = static_cast<std::size_t>(quad.dim);
    CompensatedSum inner, norm2;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double f = target.value({pts.data() + j * d, d});
        inner.add(w[j] * (f - sv[j]));
        norm2.add(w[j] * f);
    }
    NativeError e;
    e.inner = inner.value();
    e.target_norm2 = norm2.value();
    e.order = quad.order();
    e.panels = quad.panel_count();
    if (e.inner < -native_error_relative_floor * std::abs(e.target_norm2))
        throw quadrature_error("<f, f - I f> = " + std::to_string(e.inner) + " is negative beyond quadrature tolerance");
    e.value = std::sqrt(std::max(0.0, e.inner));
    return e;
}

inline double target_error_native_seminorm(const TargetFunction& target, const Interpolant& s, const QuadratureRule& quad)
{
    return target_error_native(target, s, quad).value;
}

// sqrt(|f|_N^2 - a^T Phi a): the Pythagorean route. Loses digits to cancellation once the
// error is small relative to |f|_N.
inline double native_error_by_difference(const TargetFunction& target, const Interpolant& s, const QuadratureRule& quad)
{
    const SourceDensity& nu = target.density();
    CompensatedSum norm2;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const double v = nu(quad.node(j));
        if (v != 0) norm2.add(v * quad.weights[j] * target.value(quad.node(j)));
    }
    const double diff = norm2.value() - std::pow(native_seminorm_discrete(s), 2);
    if (diff < -native_error_relative_floor * std::abs(norm2.value()))
        throw quadrature_error("|f|^2 - |I f|^2 is negative beyond quadrature tolerance");
    return std::sqrt(std::max(0.0, diff));
}

inline constexpr double e_ratio_floor = 1e-12;

// ||f - I f||_L2 / |f - I f|_N, or nothing when the denominator is below the floor.
inline std::optional<double> e_ratio(const TargetFunction& target, const Interpolant& s, double l2_error, const QuadratureRule& quad)
{
    const double native = target_error_native_seminorm(target, s, quad);
    if (!(native > e_ratio_floor)) return std::nullopt;
    return l2_error / native;
}

}  // namespace kinterp
