#pragma once

// Radial kernels: surface splines, Matérn (Bessel potential) kernels and the
// compactly supported generalized Wendland functions, together with the
// constants that the approximation theory attaches to each family.

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinterp/error.hpp"

namespace kinterp {

enum class KernelFamily { SurfaceSpline, Matern, GeneralizedWendland };

inline std::string_view family_name(KernelFamily f)
{
    switch (f) {
        case KernelFamily::SurfaceSpline: return "surface_spline";
        case KernelFamily::Matern: return "matern";
        case KernelFamily::GeneralizedWendland: return "generalized_wendland";
    }
    return "unknown";
}

inline KernelFamily parse_family(std::string_view name)
{
    if (name == "surface_spline") return KernelFamily::SurfaceSpline;
    if (name == "matern") return KernelFamily::Matern;
    if (name == "generalized_wendland") return KernelFamily::GeneralizedWendland;
    throw parameter_error("unknown kernel family '" + std::string(name) + "'");
}

struct KernelSpec {
    KernelFamily family = KernelFamily::Matern;
    int dim = 1;
    int m = 0;        // surface spline order
    double tau = 0;   // Matérn smoothness
    int k = 0;        // generalized Wendland smoothing steps
    int ell = 0;      // generalized Wendland truncated-power exponent

    static KernelSpec surface_spline(int d, int order)
    {
        KernelSpec s;
        s.family = KernelFamily::SurfaceSpline;
        s.dim = d;
        s.m = order;
        return s;
    }
    static KernelSpec matern(int d, double smoothness)
    {
        KernelSpec s;
        s.family = KernelFamily::Matern;
        s.dim = d;
        s.tau = smoothness;
        return s;
    }
    static KernelSpec generalized_wendland(int d, int k, int ell)
    {
        KernelSpec s;
        s.family = KernelFamily::GeneralizedWendland;
        s.dim = d;
        s.k = k;
        s.ell = ell;
        return s;
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline void validate(const KernelSpec& spec)
{
    if (spec.dim < 1) throw parameter_error("kernel dimension must be positive");
    const double half_d = 0.5 * spec.dim;
    switch (spec.family) {
        case KernelFamily::SurfaceSpline:
            if (!(spec.m > half_d))
                throw parameter_error("surface spline requires integer m > d/2 (m=" + std::to_string(spec.m) +
                                      ", d=" + std::to_string(spec.dim) + ")");
            break;
        case KernelFamily::Matern:
            if (!std::isfinite(spec.tau) || !(spec.tau > half_d))
                throw parameter_error("Matern kernel requires tau > d/2");
            break;
        case KernelFamily::GeneralizedWendland:
            if (spec.k < 1) throw parameter_error("generalized Wendland requires k >= 1");
            if (spec.ell < spec.k + spec.dim)
                throw parameter_error("generalized Wendland requires ell >= k + d");
            break;
    }
}

// One-line text form, e.g. "matern d=1 tau=2" or "generalized_wendland d=2 k=1 ell=3".
inline std::string to_string(const KernelSpec& spec)
{
    std::ostringstream os;
    os.precision(17);
    os << family_name(spec.family) << " d=" << spec.dim;
    switch (spec.family) {
        case KernelFamily::SurfaceSpline: os << " m=" << spec.m; break;
        case KernelFamily::Matern: os << " tau=" << spec.tau; break;
        case KernelFamily::GeneralizedWendland: os << " k=" << spec.k << " ell=" << spec.ell; break;
    }
    return os.str();
}

inline KernelSpec parse_kernel_spec(std::string_view text)
{
    std::istringstream is{std::string(text)};
    std::string word;
    if (!(is >> word)) throw parameter_error("empty kernel spec");
    KernelSpec spec;
    spec.family = parse_family(word);
    bool have_d = false;
    while (is >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw parameter_error("malformed kernel parameter '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string value = word.substr(eq + 1);
        try {
            if (key == "d") {
                spec.dim = std::stoi(value);
                have_d = true;
            } else if (key == "m" && spec.family == KernelFamily::SurfaceSpline) {
                spec.m = std::stoi(value);
            } else if (key == "tau" && spec.family == KernelFamily::Matern) {
                spec.tau = std::stod(value);
            } else if (key == "k" && spec.family == KernelFamily::GeneralizedWendland) {
                spec.k = std::stoi(value);
            } else if (key == "ell" && spec.family == KernelFamily::GeneralizedWendland) {
                spec.ell = std::stoi(value);
            } else {
                throw parameter_error("unknown kernel parameter '" + key + "' for " +
                                      std::string(family_name(spec.family)));
            }
        } catch (const std::logic_error&) {
            throw parameter_error("bad value for kernel parameter '" + key + "'");
        }
    }
    if (!have_d) throw parameter_error("kernel spec is missing d=");
    validate(spec);
    return spec;
}

struct KernelProps {
    int cpd_order = 0;                  // m0: polynomials of degree < m0 are annihilated
    double native_exponent = 0;         // tau: native space ~ H^tau
    double homogeneity = 0;             // s = 2 tau - d
    double support_radius = std::numeric_limits<double>::infinity();
    double fourier_r0 = 1.0;            // the symbol bounds hold for |omega| > r0; any r0 > 0 works for these families
};

inline KernelProps kernel_properties(const KernelSpec& spec)
{
    validate(spec);
    KernelProps p;
    const double d = spec.dim;
    switch (spec.family) {
        case KernelFamily::SurfaceSpline:
            p.cpd_order = spec.m;
            p.native_exponent = spec.m;
            break;
        case KernelFamily::Matern:
            p.cpd_order = 0;
            p.native_exponent = spec.tau;
            break;
        case KernelFamily::GeneralizedWendland:
            p.cpd_order = 0;
            p.native_exponent = spec.k + 0.5 * (d + 1);
            p.support_radius = 1.0;
            break;
    }
    p.homogeneity = 2.0 * p.native_exponent - d;
    return p;
}

// h_s(r) = r^s, or r^s log r when s is an even integer.
inline double hs_value(double s, double r)
{
    if (!(r > 0)) throw domain_error("h_s is only evaluated at r > 0");
    const double rs = std::pow(r, s);
    const bool even_integer = s == std::round(s) && std::fmod(s, 2.0) == 0.0;
    return even_integer ? rs * std::log(r) : rs;
}

namespace detail {

inline double factorial(int n)
{
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace detail

// Monomial coefficients c_j of r -> I^k psi_ell(r) = sum_j c_j r^j on [0, 1],
//   I^k psi_ell(r) = 2^{1-k}/Gamma(k) * int_r^1 t (1-t)^ell (t^2 - r^2)^{k-1} dt,
// obtained by expanding the integrand in t and integrating term by term.
// Tables are built once per (k, ell) and never modified afterwards.
inline const std::vector<double>& generalized_wendland_coefficients(int k, int ell)
{
    if (k < 1) throw parameter_error("generalized Wendland requires k >= 1");
    if (ell < 0) throw parameter_error("generalized Wendland requires ell >= 0");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({k, ell});
    if (it != cache.end()) return it->second;

    std::vector<long double> c(static_cast<std::size_t>(2 * k + ell + 1), 0.0L);
    const long double prefactor = std::ldexp(1.0L, 1 - k) / detail::factorial(k - 1);
    for (int j = 0; j <= k - 1; ++j) {
        // (t^2 - r^2)^{k-1} term: binom(k-1, j) t^{2j} (-r^2)^{k-1-j}
        const long double bj = detail::binomial(k - 1, j) * (((k - 1 - j) % 2) ? -1.0L : 1.0L);
        const int rpow = 2 * (k - 1 - j);
        for (int i = 0; i <= ell; ++i) {
            const long double bi = detail::binomial(ell, i) * ((i % 2) ? -1.0L : 1.0L);
            const int p = 1 + i + 2 * j;  // power of t
            const long double w = prefactor * bj * bi / (p + 1);
            // int_r^1 t^p dt = (1 - r^{p+1}) / (p + 1)
            c[static_cast<std::size_t>(rpow)] += w;
            c[static_cast<std::size_t>(rpow + p + 1)] -= w;
        }
    }
    std::vector<double> out(c.begin(), c.end());
    return cache.emplace(std::pair{k, ell}, std::move(out)).first->second;
}

inline double generalized_wendland_value(int k, int ell, double r)
{
    if (k < 1) throw parameter_error("generalized Wendland requires k >= 1");
    if (r < 0) throw domain_error("negative radius");
    if (r >= 1) return 0.0;
    const auto& c = generalized_wendland_coefficients(k, ell);
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
    return v;
}

namespace detail {

// r^nu K_nu(r) for nu = n + 1/2: sqrt(pi/2) e^{-r} sum_j (n+j)!/(j!(n-j)! 2^j) r^{n-j}.
inline double matern_half_integer(int n, double r)
{
    double poly = 0;
    for (int j = 0; j <= n; ++j) {
        const double coef = factorial(n + j) / (factorial(j) * factorial(n - j) * std::ldexp(1.0, j));
        poly += coef * std::pow(r, n - j);
    }
    return std::sqrt(std::numbers::pi / 2) * std::exp(-r) * poly;
}

inline bool is_half_integer(double nu, int& n)
{
    const double t = nu - 0.5;
    if (t >= 0 && t == std::round(t) && t < 64) {
        n = static_cast<int>(t);
        return true;
    }
    return false;
}

}  // namespace detail

// Raw Matérn product r^nu K_nu(r) with nu = tau - d/2, extended to r = 0 by 2^{nu-1} Gamma(nu).
inline double matern_value(double nu, double r)
{
    if (r < 0) throw domain_error("negative radius");
    int n = 0;
    if (detail::is_half_integer(nu, n)) return detail::matern_half_integer(n, r);
    if (r == 0) return std::pow(2.0, nu - 1) * std::tgamma(nu);
    if (r > 700) return 0.0;
    return std::pow(r, nu) * std::cyl_bessel_k(nu, r);
}

// Sign that makes the surface spline's quadratic form positive on the
// polynomial-annihilating subspace.
inline double surface_spline_sign(int m, int d)
{
    int exponent = 0;
    if (d % 2 == 1) {
        exponent = m - (d - 1) / 2;  // ceil(m - d/2)
    } else {
        exponent = m - d / 2 + 1;
    }
    return (exponent % 2 == 0) ? 1.0 : -1.0;
}

inline double kernel_value(const KernelSpec& spec, double r)
{
    validate(spec);
    if (r < 0 || std::isnan(r)) throw domain_error("kernel evaluated at negative radius");
    switch (spec.family) {
        case KernelFamily::SurfaceSpline:
            if (r == 0) return 0.0;
            return surface_spline_sign(spec.m, spec.dim) * hs_value(2 * spec.m - spec.dim, r);
        case KernelFamily::Matern:
            return matern_value(spec.tau - 0.5 * spec.dim, r);
        case KernelFamily::GeneralizedWendland:
            return generalized_wendland_value(spec.k, spec.ell, r);
    }
    return 0;
}

// Evaluator with the parameter checks hoisted out; used in assembly and evaluation loops.
class RadialKernel {
public:
    explicit RadialKernel(const KernelSpec& spec) : spec_(spec)
    {
        validate(spec_);
        switch (spec_.family) {
            case KernelFamily::SurfaceSpline:
                sign_ = surface_spline_sign(spec_.m, spec_.dim);
                power_ = 2 * spec_.m - spec_.dim;
                log_branch_ = spec_.dim % 2 == 0;
                break;
            case KernelFamily::Matern: {
                nu_ = spec_.tau - 0.5 * spec_.dim;
                int n = 0;
                half_integer_ = detail::is_half_integer(nu_, n);
                if (half_integer_) {
                    half_n_ = n;
                    for (int j = 0; j <= n; ++j)
                        coefs_.push_back(detail::factorial(n + j) /
                                         (detail::factorial(j) * detail::factorial(n - j) * std::ldexp(1.0, j)));
                }
                break;
            }
            case KernelFamily::GeneralizedWendland:
                coefs_ = generalized_wendland_coefficients(spec_.k, spec_.ell);
                break;
        }
    }

    const KernelSpec& spec() const noexcept { return spec_; }

    double operator()(double r) const
    {
        switch (spec_.family) {
            case KernelFamily::SurfaceSpline: {
                if (r == 0) return 0.0;
                double v = 1;
                for (int i = 0; i < power_; ++i) v *= r;
                return log_branch_ ? sign_ * v * std::log(r) : sign_ * v;
            }
            case KernelFamily::Matern: {
                if (!half_integer_) return matern_value(nu_, r);
                // e^{-r} sum_j c_j r^{n-j}, Horner in r over descending j
                double poly = 0;
                for (int j = 0; j <= half_n_; ++j) poly = poly * r + coefs_[static_cast<std::size_t>(half_n_ - j)];
                return std::sqrt(std::numbers::pi / 2) * std::exp(-r) * poly;
            }
            case KernelFamily::GeneralizedWendland: {
                if (r >= 1) return 0.0;
                double v = 0;
                for (auto it = coefs_.rbegin(); it != coefs_.rend(); ++it) v = v * r + *it;
                return v;
            }
        }
        return 0;
    }

private:
    KernelSpec spec_;
    double sign_ = 1;
    int power_ = 0;
    bool log_branch_ = false;
    double nu_ = 0;
    bool half_integer_ = false;
    int half_n_ = 0;
    std::vector<double> coefs_;
};

struct FourierSymbol {
    double lower = 0;
    double upper = 0;
    bool exact = true;  // false: the pair is a decay envelope with unit constants
};

// Generalized Fourier transform of the kernel as a function of |omega|.
inline FourierSymbol fourier_symbol_value(const KernelSpec& spec, double omega_norm)
{
    validate(spec);
    if (omega_norm < 0 || std::isnan(omega_norm)) throw domain_error("negative frequency");
    switch (spec.family) {
        case KernelFamily::SurfaceSpline: {
            if (omega_norm == 0) throw domain_error("surface spline symbol is singular at omega = 0");
            const double v = std::pow(omega_norm, -2.0 * spec.m);
            return {v, v, true};
        }
        case KernelFamily::Matern: {
            const double v = std::pow(1 + omega_norm * omega_norm, -spec.tau);
            return {v, v, true};
        }
        case KernelFamily::GeneralizedWendland: {
            const double v = std::pow(1 + omega_norm, -(spec.dim + 2.0 * spec.k + 1));
            return {v, v, false};
        }
    }
    return {};
}

// kappa such that phi * (kappa L g) = g for compactly supported smooth g, where L is the
// operator the kernel inverts: (-Delta)^m for surface splines, (1 - Delta)^tau for Matérn.
// Throws for generalized Wendland, which has no such closed-form source.
inline double fundamental_solution_scale(const KernelSpec& spec)
{
    validate(spec);
    const double d = spec.dim;
    const double pi = std::numbers::pi;
    switch (spec.family) {
        case KernelFamily::SurfaceSpline: {
            const int m = spec.m;
            if (spec.dim % 2 == 1) {
                return std::abs(std::tgamma(d / 2 - m)) /
                       (std::pow(4.0, m) * std::pow(pi, d / 2) * std::tgamma(static_cast<double>(m)));
            }
            return 1.0 / (std::pow(2.0, 2 * m - 1) * std::pow(pi, d / 2) * detail::factorial(m - 1) *
                          detail::factorial(m - spec.dim / 2));
        }
        case KernelFamily::Matern:
            return 1.0 / (std::pow(2 * pi, d / 2) * std::pow(2.0, spec.tau - 1) * std::tgamma(spec.tau));
        case KernelFamily::GeneralizedWendland:
            break;
    }
    throw parameter_error("generalized Wendland kernels have no closed-form source operator");
}

}  // namespace kinterp
