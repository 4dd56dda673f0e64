#pragma once

// Reference values computed without the library: closed forms, brute-force quadrature and
// classical algorithms. Tests compare the library against these.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kinterp::oracle {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule gauss(int n)
{
    GaussRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
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
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = 2 / ((1 - x * x) * dp * dp);
    }
    return r;
}

// Composite Gauss-Legendre over the given breakpoints.
inline double integrate(const std::function<double(double)>& f, std::vector<double> breaks, int order = 20)
{
    static thread_local std::pair<int, GaussRule> cached{0, {}};
    if (cached.first != order) cached = {order, gauss(order)};
    const GaussRule& g = cached.second;
    std::sort(breaks.begin(), breaks.end());
    double s = 0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * half * f(mid + half * g.x[i]);
    }
    return s;
}

inline std::vector<double> linspace(double a, double b, std::size_t panels)
{
    std::vector<double> v(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
    return v;
}

inline double beta(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// r^{3/2} K_{3/2}(r) = sqrt(pi/2) (1 + r) e^{-r}.
inline double matern_three_halves(double r) { return std::sqrt(std::numbers::pi / 2) * (1 + r) * std::exp(-r); }

// K_nu(r) = int_0^inf exp(-r cosh t) cosh(nu t) dt, truncated where the integrand underflows.
inline double bessel_k(double nu, double r)
{
    if (!(r > 0)) throw std::domain_error("bessel_k needs r > 0");
    const double t_max = std::acosh(std::max(1.0, 745.0 / r)) + 1.0;
    return integrate([&](double t) { return std::exp(-r * std::cosh(t)) * std::cosh(nu * t); }, linspace(0, t_max, 64), 20);
}

inline double matern(double nu, double r)
{
    if (r == 0) return std::pow(2.0, nu - 1) * std::tgamma(nu);
    return std::pow(r, nu) * bessel_k(nu, r);
}

// 2^{1-k}/Gamma(k) int_r^1 t (1-t)^ell (t^2 - r^2)^{k-1} dt by quadrature.
inline double generalized_wendland(int k, int ell, double r)
{
    if (r >= 1) return 0;
    const double c = std::pow(2.0, 1 - k) / std::tgamma(k);
    return c * integrate([&](double t) { return t * std::pow(1 - t, ell) * std::pow(t * t - r * r, k - 1); }, {r, 1.0}, 40);
}

// Value at r = 0: 2^{1-k}/Gamma(k) B(2k, ell + 1).
inline double generalized_wendland_at_zero(int k, int ell) { return std::pow(2.0, 1 - k) / std::tgamma(k) * beta(2 * k, ell + 1); }

// Natural cubic spline through (x_i, y_i), x strictly increasing; evaluated at t.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("spline needs >= 2 matching nodes");
        m_.assign(n, 0.0);
        if (n == 2) return;
        // Tridiagonal system for the interior second derivatives (Thomas algorithm).
        std::vector<double> a(n), b(n), c(n), r(n);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            a[i] = h0;
            b[i] = 2 * (h0 + h1);
            c[i] = h1;
            r[i] = 6 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            r[i] -= f * r[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
            if (i == 1) break;
        }
    }

    double operator()(double t) const
    {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
        return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6;
    }

private:
    std::vector<double> x_, y_, m_;
};

// int_a^b (d^k/dx^k sin(w x))^2 dx.
inline double sin_seminorm_squared(double w, int k, double a, double b)
{
    const double phase = k * std::numbers::pi / 2;
    const double sq = (b - a) / 2 - (std::sin(2 * (w * b + phase)) - std::sin(2 * (w * a + phase))) / (4 * w);
    return std::pow(w, 2 * k) * sq;
}

// sum_{j <= k} |sin(w .)|_{H^j(a,b)}^2.
inline double sin_norm_squared(double w, int k, double a, double b)
{
    double s = 0;
    for (int j = 0; j <= k; ++j) s += sin_seminorm_squared(w, j, a, b);
    return s;
}

// int int nu(x) nu(y) phi(|x - y|) dx dy over [a, b]^2 in 1-d; the inner integral is split at
// y = x where phi is not smooth.
inline double double_integral(const std::function<double(double)>& nu, const std::function<double(double)>& phi, double a, double b,
                              std::size_t panels = 64, int order = 20)
{
    const auto outer = linspace(a, b, panels);
    return integrate(
        [&](double x) {
            auto br = linspace(a, b, panels);
            br.push_back(x);
            return nu(x) * integrate([&](double y) { return nu(y) * phi(std::abs(x - y)); }, br, order);
        },
        outer, order);
}

// int phi(|x - y|) nu(y) dy over [a, b], split at y = x.
inline double convolution(const std::function<double(double)>& nu, const std::function<double(double)>& phi, double x, double a, double b,
                          std::size_t panels = 64, int order = 20)
{
    auto br = linspace(a, b, panels);
    if (x > a && x < b) br.push_back(x);
    return integrate([&](double y) { return nu(y) * phi(std::abs(x - y)); }, br, order);
}

// Least-squares slope and intercept of log e against log x.
inline std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& e)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(e[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

// e_i = C x_i^p exactly.
inline std::vector<double> power_law(const std::vector<double>& x, double c, double p)
{
    std::vector<double> e;
    for (double v : x) e.push_back(c * std::pow(v, p));
    return e;
}

// j-th derivative of cos^p(theta), by differentiating sum c_ab cos^a sin^b term by term:
// d(cos^a sin^b) = -a cos^{a-1} sin^{b+1} + b cos^{a+1} sin^{b-1}.
inline double cos_power_derivative(int p, double theta, int j)
{
    std::vector<std::vector<double>> c(static_cast<std::size_t>(p + j + 2), std::vector<double>(static_cast<std::size_t>(j + 2), 0.0));
    c[static_cast<std::size_t>(p)][0] = 1;
    for (int step = 0; step < j; ++step) {
        auto next = c;
        for (auto& row : next) std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = 0; b < c[a].size(); ++b) {
                const double v = c[a][b];
                if (v == 0) continue;
                if (a > 0) next[a - 1][b + 1] -= v * static_cast<double>(a);
                if (b > 0) next[a + 1][b - 1] += v * static_cast<double>(b);
            }
        c = std::move(next);
    }
    const double co = std::cos(theta), si = std::sin(theta);
    double s = 0;
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = 0; b < c[a].size(); ++b)
            if (c[a][b] != 0) s += c[a][b] * std::pow(co, static_cast<double>(a)) * std::pow(si, static_cast<double>(b));
    return s;
}

// j-th derivative of x -> cos^p(pi (x - center) / (2 w)), zero outside |x - center| <= w.
inline double bump_derivative(int p, double center, double w, double x, int j)
{
    if (std::abs(x - center) > w) return 0;
    const double k = std::numbers::pi / (2 * w);
    return std::pow(k, j) * cos_power_derivative(p, k * (x - center), j);
}

}  // namespace kinterp::oracle
