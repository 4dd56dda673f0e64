#pragma once

// Sobolev norms of sampled functions on tensor grids (4th-order finite differences, trapezoid
// rule), and least-squares convergence-rate fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/polynomial.hpp"

namespace kinterp {

// Values on the tensor grid of `nodes[i]` equispaced points per axis over `box`, last axis fastest.
struct GridFunction {
    Box box;
    std::vector<std::size_t> nodes;
    std::vector<double> values;

    int dim() const noexcept { return box.dim(); }
    double spacing(int axis) const { return box.side(axis) / static_cast<double>(nodes[static_cast<std::size_t>(axis)] - 1); }
    std::size_t size() const
    {
        std::size_t n = 1;
        for (auto k : nodes) n *= k;
        return n;
    }
    void check() const
    {
        if (static_cast<int>(nodes.size()) != box.dim()) throw domain_error("grid node counts do not match the box dimension");
        for (auto k : nodes)
            if (k < 9) throw resolution_error("grid functions need at least 9 nodes per axis");
        if (values.size() != size()) throw domain_error("grid value count does not match the node counts");
    }
};

// Grid coordinates, row-major, last axis fastest.
inline std::vector<double> grid_points(const Box& box, std::span<const std::size_t> nodes)
{
    const auto d = static_cast<std::size_t>(box.dim());
    std::size_t total = 1;
    for (auto k : nodes) total *= k;
    std::vector<double> pts;
    pts.reserve(total * d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t k = 0; k < d; ++k) {
            const double t = static_cast<double>(idx[k]) / static_cast<double>(nodes[k] - 1);
            pts.push_back(idx[k] + 1 == nodes[k] ? box.upper[k] : box.lower[k] + t * (box.upper[k] - box.lower[k]));
        }
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < nodes[k]) break;
            idx[k] = 0;
        }
    }
    return pts;
}

inline GridFunction sample_grid(const Box& box, std::vector<std::size_t> nodes, const std::function<double(std::span<const double>)>& f)
{
    GridFunction g{box, std::move(nodes), {}};
    const auto pts = grid_points(box, g.nodes);
    const auto d = static_cast<std::size_t>(box.dim());
    g.values.resize(pts.size() / d);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = f({pts.data() + i * d, d});
    g.check();
    return g;
}

// Finite-difference weights for the `deriv`-th derivative at x0 from the nodes x (Fornberg).
inline std::vector<double> fornberg_weights(double x0, std::span<const double> x, int deriv)
{
    const auto n = x.size();
    const auto m = static_cast<std::size_t>(deriv);
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1, c4 = x[0] - x0;
    c[0][0] = 1;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

// Stencils of 4th-order accuracy on a unit-spaced grid of n nodes: for node i, the first node
// and the weights. Interior nodes use the symmetric stencil; nodes near the ends use j + 4
// consecutive one-sided nodes.
struct DifferenceOperator {
    std::vector<std::size_t> start;
    std::vector<std::vector<double>> weights;
};

inline const DifferenceOperator& difference_operator(std::size_t n, int deriv)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, DifferenceOperator> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find({n, deriv}); it != cache.end()) return it->second;
    DifferenceOperator op;
    const std::size_t half = static_cast<std::size_t>((deriv + 3) / 2);  // symmetric stencil has 2 half + 1 nodes
    const std::size_t side = static_cast<std::size_t>(deriv + 4);
    std::map<long, std::vector<double>> memo;  // weights depend only on the stencil length and the offset of node i
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t s = 0, len = 0;
        if (i >= half && i + half < n) {
            s = i - half;
            len = 2 * half + 1;
        } else {
            len = side;
            s = i < half ? 0 : n - side;
        }
        const long offset = static_cast<long>(i) - static_cast<long>(s);
        const long key = static_cast<long>(len) * 100000 + offset;
        auto it = memo.find(key);
        if (it == memo.end()) {
            std::vector<double> x(len);
            for (std::size_t k = 0; k < len; ++k) x[k] = static_cast<double>(k);
            it = memo.emplace(key, fornberg_weights(static_cast<double>(offset), x, deriv)).first;
        }
        op.start.push_back(s);
        op.weights.push_back(it->second);
    }
    return cache.emplace(std::pair{n, deriv}, std::move(op)).first->second;
}

// Applies d^j/dx_axis^j to a row-major array with the given node counts.
inline std::vector<double> differentiate(std::span<const double> values, std::span<const std::size_t> nodes, int axis, int order, double spacing)
{
    if (order == 0) return {values.begin(), values.end()};
    const auto a = static_cast<std::size_t>(axis);
    const std::size_t n = nodes[a];
    if (n < static_cast<std::size_t>(order + 4) || n < static_cast<std::size_t>(2 * ((order + 3) / 2) + 1))
        throw resolution_error("grid too coarse for a derivative of order " + std::to_string(order));
    const DifferenceOperator& op = difference_operator(n, order);
    std::size_t stride = 1;
    for (std::size_t k = a + 1; k < nodes.size(); ++k) stride *= nodes[k];
    std::size_t outer = 1;
    for (std::size_t k = 0; k < a; ++k) outer *= nodes[k];
    const double scale = std::pow(spacing, -order);
    std::vector<double> out(values.size());
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t base = o * n * stride + inner;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& w = op.weights[i];
                const std::size_t s = op.start[i];
                double acc = 0;
                for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * values[base + (s + k) * stride];
                out[base + i * stride] = acc * scale;
            }
        }
    }
    return out;
}

// Composite trapezoid rule for int u^2 over the grid box.
inline double trapezoid_square_integral(std::span<const double> values, const GridFunction& gf)
{
    const auto d = static_cast<std::size_t>(gf.dim());
    std::vector<std::size_t> idx(d, 0);
    double cell = 1;
    for (int i = 0; i < gf.dim(); ++i) cell *= gf.spacing(i);
    CompensatedSum s;
    for (std::size_t n = 0; n < values.size(); ++n) {
        double w = cell;
        for (std::size_t k = 0; k < d; ++k)
            if (idx[k] == 0 || idx[k] + 1 == gf.nodes[k]) w *= 0.5;
        s.add(w * values[n] * values[n]);
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < gf.nodes[k]) break;
            idx[k] = 0;
        }
    }
    return s.value();
}

// |u|_{W_2^k}^2 = sum_{|alpha| = k} k!/alpha! ||D^alpha u||^2.
inline double sobolev_seminorm_squared(const GridFunction& gf, int k)
{
    gf.check();
    if (k < 0) throw parameter_error("Sobolev order must be nonnegative");
    for (auto n : gf.nodes)
        if (n < static_cast<std::size_t>(2 * k + 5)) throw resolution_error("grid needs at least 2k + 5 nodes per axis for order " + std::to_string(k));
    if (k == 0) return trapezoid_square_integral(gf.values, gf);
    double total = 0;
    for (const auto& alpha : multi_indices(gf.dim(), k)) {
        int sum = 0;
        for (int a : alpha) sum += a;
        if (sum != k) continue;
        double multinomial = detail::factorial(k);
        for (int a : alpha) multinomial /= detail::factorial(a);
        std::vector<double> v = gf.values;
        for (int axis = 0; axis < gf.dim(); ++axis)
            if (alpha[static_cast<std::size_t>(axis)] > 0) v = differentiate(v, gf.nodes, axis, alpha[static_cast<std::size_t>(axis)], gf.spacing(axis));
        total += multinomial * trapezoid_square_integral(v, gf);
    }
    return total;
}

inline double sobolev_seminorm_grid(const GridFunction& gf, int k) { return std::sqrt(sobolev_seminorm_squared(gf, k)); }

// Full norms for every requested order, sharing the seminorm computations. Fractional orders
// use ||u||_floor^{1-theta} ||u||_ceil^theta.
inline std::vector<double> sobolev_norms_grid(const GridFunction& gf, std::span<const double> sigmas)
{
    int top = 0;
    for (double s : sigmas) {
        if (!(s >= 0) || !std::isfinite(s)) throw parameter_error("Sobolev order must be a finite nonnegative number");
        top = std::max(top, static_cast<int>(std::ceil(s)));
    }
    std::vector<double> cumulative;
    if (!sigmas.empty()) {
        double acc = 0;
        for (int j = 0; j <= top; ++j) {
            acc += sobolev_seminorm_squared(gf, j);
            cumulative.push_back(std::sqrt(acc));
        }
    }
    std::vector<double> out;
    for (double s : sigmas) {
        const int lo = static_cast<int>(std::floor(s));
        const double theta = s - lo;
        if (theta == 0) {
            out.push_back(cumulative[static_cast<std::size_t>(lo)]);
        } else {
            out.push_back(std::pow(cumulative[static_cast<std::size_t>(lo)], 1 - theta) * std::pow(cumulative[static_cast<std::size_t>(lo + 1)], theta));
        }
    }
    return out;
}

inline double sobolev_norm_grid(const GridFunction& gf, double sigma)
{
    const double s[] = {sigma};
    return sobolev_norms_grid(gf, s).front();
}

struct RateFit {
    std::vector<double> x;       // h (or q) of the levels used
    std::vector<double> e;
    std::vector<std::size_t> used;      // indices into the input
    std::vector<std::size_t> excluded;  // nonpositive or non-finite errors
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // RMS of the log residuals
};

// Least-squares slope of log e against log x.
inline RateFit fit_convergence_rate(std::span<const double> x, std::span<const double> e)
{
    if (x.size() != e.size()) throw parameter_error("rate fit needs equally many abscissae and errors");
    RateFit fit;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (e[i] > 0 && std::isfinite(e[i]) && x[i] > 0 && std::isfinite(x[i])) {
            fit.used.push_back(i);
            fit.x.push_back(x[i]);
            fit.e.push_back(e[i]);
        } else {
            fit.excluded.push_back(i);
        }
    }
    const std::size_t n = fit.used.size();
    if (n < 3) throw insufficient_data_error("rate fit needs at least 3 positive data points, got " + std::to_string(n));
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(fit.x[i]);
        my += std::log(fit.e[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(fit.x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(fit.e[i]) - my);
    }
    if (!(sxx > 0)) throw insufficient_data_error("rate fit needs at least two distinct abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(fit.e[i]) - (fit.intercept + fit.slope * std::log(fit.x[i]));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(n));
    return fit;
}

}  // namespace kinterp
