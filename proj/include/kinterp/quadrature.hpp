#pragma once

// Gauss–Legendre rules: 1-d nodes by Newton iteration on P_n, composite panels, tensor products.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"

namespace kinterp {

struct GaussLegendre1D {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
inline const GaussLegendre1D& gauss_legendre(int n)
{
    if (n < 1 || n > 256) throw parameter_error("Gauss-Legendre order out of range");
    static std::mutex mutex;
    static std::map<int, GaussLegendre1D> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    GaussLegendre1D rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0;
    return cache.emplace(n, std::move(rule)).first->second;
}

// Composite 1-d rule over consecutive breakpoints.
struct PanelRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> breakpoints;
    int order = 0;
};

inline PanelRule1D panel_rule(std::span<const double> breakpoints, int order)
{
    if (breakpoints.size() < 2) throw parameter_error("panel rule needs at least two breakpoints");
    const auto& gl = gauss_legendre(order);
    PanelRule1D r;
    r.order = order;
    r.breakpoints.assign(breakpoints.begin(), breakpoints.end());
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p], b = breakpoints[p + 1];
        if (!(b > a)) throw parameter_error("panel breakpoints must increase");
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            r.nodes.push_back(mid + half * gl.nodes[i]);
            r.weights.push_back(half * gl.weights[i]);
        }
    }
    return r;
}

inline std::vector<double> uniform_breakpoints(double a, double b, std::size_t panels)
{
    if (panels < 1) throw parameter_error("need at least one panel");
    std::vector<double> bp(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) bp[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
    bp.back() = b;
    return bp;
}

// Uniform breakpoints with extra cuts inserted (only those strictly inside (a, b)).
inline std::vector<double> breakpoints_with_cuts(double a, double b, std::size_t panels, std::span<const double> cuts,
                                                 double min_gap = 0)
{
    std::vector<double> bp = uniform_breakpoints(a, b, panels);
    for (double c : cuts)
        if (c > a && c < b) bp.push_back(c);
    std::sort(bp.begin(), bp.end());
    const double tol = std::max(min_gap, 1e-14 * (b - a));
    std::vector<double> out;
    for (double x : bp)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    if (out.back() < b) out.back() = b;
    return out;
}

// Tensor-product quadrature over a box: nodes stored row-major (d per node), last axis fastest.
struct QuadratureRule {
    int dim = 1;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<PanelRule1D> axes;  // empty when the rule is not a tensor product

    std::size_t size() const noexcept { return weights.size(); }
    std::span<const double> node(std::size_t i) const
    {
        const auto d = static_cast<std::size_t>(dim);
        return {nodes.data() + i * d, d};
    }
    int order() const noexcept { return axes.empty() ? 0 : axes.front().order; }
    std::size_t panel_count() const noexcept
    {
        std::size_t c = 1;
        for (const auto& a : axes) c *= a.breakpoints.size() - 1;
        return c;
    }
};

inline QuadratureRule tensor_rule(std::vector<PanelRule1D> axes, std::size_t max_nodes = 50'000'000)
{
    QuadratureRule q;
    q.dim = static_cast<int>(axes.size());
    double total = 1;
    for (const auto& a : axes) total *= static_cast<double>(a.nodes.size());
    if (total > static_cast<double>(max_nodes)) throw resource_error("quadrature rule exceeds the node budget");
    const auto n = static_cast<std::size_t>(total);
    q.weights.reserve(n);
    q.nodes.reserve(n * axes.size());
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        double w = 1;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            q.nodes.push_back(axes[k].nodes[idx[k]]);
            w *= axes[k].weights[idx[k]];
        }
        q.weights.push_back(w);
        std::size_t k = idx.size();
        bool done = true;
        while (k > 0) {
            --k;
            if (++idx[k] < axes[k].nodes.size()) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if (done) break;
    }
    q.axes = std::move(axes);
    return q;
}

// Same panel layout on every axis of the box, `panels` panels per axis.
inline QuadratureRule box_rule(const Box& box, std::size_t panels, int order)
{
    std::vector<PanelRule1D> axes;
    for (int i = 0; i < box.dim(); ++i)
        axes.push_back(panel_rule(uniform_breakpoints(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)], panels), order));
    return tensor_rule(std::move(axes));
}

}  // namespace kinterp
