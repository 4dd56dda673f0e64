#pragma once

// Targets f = phi * nu + p with a source density nu built from a cosine bump g.
//   surface splines:  nu = kappa (-Delta)^m g   =>  f = g
//   Matérn, integer tau:  nu = (1 - Delta)^tau g / c  =>  f = g
//   otherwise:  nu = g and f is evaluated by convolution quadrature.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinterp/cosine_bump.hpp"
#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/kernels.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/polynomial.hpp"
#include "kinterp/quadrature.hpp"

namespace kinterp {

// nu(x) = sum_t coef_t prod_i g_i^{(orders_t[i])}(x_i), a finite sum of tensor derivatives of g.
class SourceDensity {
public:
    struct Term {
        double coef = 0;
        std::vector<int> orders;
    };

    SourceDensity() = default;
    SourceDensity(CosineBump bump, std::vector<Term> terms, int moment_order)
        : bump_(std::move(bump)), terms_(std::move(terms)), moment_order_(moment_order)
    {
    }

    static SourceDensity plain(const CosineBump& bump)
    {
        return SourceDensity(bump, {{1.0, std::vector<int>(static_cast<std::size_t>(bump.dim()), 0)}}, -1);
    }

    // scale * (-Delta)^m g; the moments of degree < 2m vanish.
    static SourceDensity laplacian_power(const CosineBump& bump, int m, double scale)
    {
        return SourceDensity(bump, laplacian_terms(bump.dim(), m, scale), 2 * m - 1);
    }

    // scale * (1 - Delta)^tau g = scale * sum_j C(tau, j) (-Delta)^j g.
    static SourceDensity helmholtz_power(const CosineBump& bump, int tau, double scale)
    {
        std::vector<Term> terms;
        for (int j = 0; j <= tau; ++j) {
            auto t = laplacian_terms(bump.dim(), j, scale * detail::binomial(tau, j));
            terms.insert(terms.end(), t.begin(), t.end());
        }
        return SourceDensity(bump, std::move(terms), -1);
    }

    int dim() const noexcept { return bump_.dim(); }
    const CosineBump& bump() const noexcept { return bump_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    Box support() const { return bump_.support(); }
    // Largest M with nu orthogonal to all polynomials of degree <= M; -1 when none are claimed.
    int moment_order() const noexcept { return moment_order_; }

    double operator()(std::span<const double> x) const
    {
        if (!bump_.support().contains(x)) return 0.0;
        double s = 0;
        for (const auto& t : terms_) s += t.coef * bump_.derivative(x, t.orders);
        return s;
    }

    bool is_zero() const noexcept
    {
        for (const auto& t : terms_)
            if (t.coef != 0) return false;
        return true;
    }

private:
    static std::vector<Term> laplacian_terms(int d, int m, double scale)
    {
        // (-Delta)^m = (-1)^m sum_{|beta| = m} m!/beta! D^{2 beta}
        std::vector<Term> terms;
        for (const auto& beta : multi_indices(d, m)) {
            int total = 0;
            for (int b : beta) total += b;
            if (total != m) continue;
            double multinomial = detail::factorial(m);
            for (int b : beta) multinomial /= detail::factorial(b);
            Term t;
            t.coef = scale * multinomial * ((m % 2) ? -1.0 : 1.0);
            for (int b : beta) t.orders.push_back(2 * b);
            terms.push_back(std::move(t));
        }
        return terms;
    }

    CosineBump bump_;
    std::vector<Term> terms_;
    int moment_order_ = -1;
};

// Tensor Gauss–Legendre rule over the support box of nu.
inline QuadratureRule support_rule(const SourceDensity& nu, std::size_t panels, int order)
{
    return box_rule(nu.support(), panels, order);
}

inline double density_l2_norm(const SourceDensity& nu, std::size_t panels = 16, int order = 12)
{
    const QuadratureRule q = support_rule(nu, panels, order);
    CompensatedSum s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double v = nu(q.node(i));
        s.add(q.weights[i] * v * v);
    }
    return std::sqrt(std::max(0.0, s.value()));
}

struct MomentCheck {
    int degree = -1;
    double max_moment = 0;   // max over scaled monomials of |int nu p|
    double l2_norm = 0;
};

// Moments of nu against ((x - c)/w)^alpha, |alpha| <= degree.
inline MomentCheck density_moments(const SourceDensity& nu, int degree, std::size_t panels = 16, int order = 12)
{
    MomentCheck m;
    m.degree = degree;
    m.l2_norm = density_l2_norm(nu, panels, order);
    if (degree < 0) return m;
    const Box box = nu.support();
    std::vector<double> c(static_cast<std::size_t>(box.dim()));
    for (int i = 0; i < box.dim(); ++i) c[static_cast<std::size_t>(i)] = box.center(i);
    const PolynomialBasis basis(box.dim(), degree, c, box.max_half_width());
    const QuadratureRule q = support_rule(nu, panels, order);
    std::vector<CompensatedSum> sums(basis.size());
    std::vector<double> p(basis.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double v = nu(q.node(i)) * q.weights[i];
        basis.evaluate(q.node(i), p);
        for (std::size_t j = 0; j < p.size(); ++j) sums[j].add(v * p[j]);
    }
    for (const auto& s : sums) m.max_moment = std::max(m.max_moment, std::abs(s.value()));
    return m;
}

inline constexpr double moment_tolerance = 1e-10;

enum class TargetPath { ClosedForm, Quadrature };

inline std::string_view path_name(TargetPath p) { return p == TargetPath::ClosedForm ? "closed-form" : "quadrature"; }

struct TargetOptions {
    std::size_t panels = 32;  // quadrature path: panels per axis over supp nu
    int order = 8;
};

class TargetFunction {
public:
    TargetFunction() = default;

    const KernelSpec& spec() const noexcept { return spec_; }
    const SourceDensity& density() const noexcept { return nu_; }
    const CosineBump& bump() const noexcept { return nu_.bump(); }
    TargetPath path() const noexcept { return path_; }
    std::size_t panels() const noexcept { return panels_; }
    int order() const noexcept { return order_; }
    double density_norm() const noexcept { return nu_norm_; }

    double value(std::span<const double> x) const
    {
        if (path_ == TargetPath::ClosedForm) return nu_.bump().value(x);
        const auto d = static_cast<std::size_t>(spec_.dim);
        double s = 0;
        for (std::size_t j = 0; j < weighted_.size(); ++j) s += weighted_[j] * phi_(distance(x, {nodes_.data() + j * d, d}));
        return s;
    }

    std::vector<double> values(std::span<const double> points) const
    {
        const auto d = static_cast<std::size_t>(spec_.dim);
        std::vector<double> out(points.size() / d);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(points.subspan(i * d, d));
        return out;
    }

    friend TargetFunction make_target(const KernelSpec&, const CosineBump&, const Box&, const TargetOptions&);

private:
    KernelSpec spec_;
    SourceDensity nu_;
    TargetPath path_ = TargetPath::ClosedForm;
    RadialKernel phi_{KernelSpec::matern(1, 1.0)};
    std::vector<double> nodes_;
    std::vector<double> weighted_;  // nu(z_j) * w_j
    std::size_t panels_ = 0;
    int order_ = 0;
    double nu_norm_ = 0;
};

inline TargetFunction make_target(const KernelSpec& spec, const CosineBump& bump, const Box& domain, const TargetOptions& opts = {})
{
    validate(spec);
    if (bump.dim() != spec.dim || domain.dim() != spec.dim) throw parameter_error("bump, kernel and domain dimensions differ");
    for (int i = 0; i < spec.dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!(bump.center()[k] - bump.half_width()[k] > domain.lower[k] && bump.center()[k] + bump.half_width()[k] < domain.upper[k]))
            throw domain_error("bump support must lie strictly inside the domain");
    }
    TargetFunction t;
    t.spec_ = spec;
    t.phi_ = RadialKernel(spec);
    const bool integer_tau = spec.family == KernelFamily::Matern && spec.tau == std::round(spec.tau);
    if (spec.family == KernelFamily::SurfaceSpline || integer_tau) {
        const int op_order = spec.family == KernelFamily::SurfaceSpline ? 2 * spec.m : 2 * static_cast<int>(spec.tau);
        if (bump.power() < 2 * op_order + 2)
            throw smoothness_error("bump power " + std::to_string(bump.power()) + " is too small for an operator of order " +
                                   std::to_string(op_order) + "; need at least " + std::to_string(2 * op_order + 2));
        const double kappa = fundamental_solution_scale(spec);
        t.nu_ = spec.family == KernelFamily::SurfaceSpline ? SourceDensity::laplacian_power(bump, spec.m, kappa)
                                                           : SourceDensity::helmholtz_power(bump, static_cast<int>(spec.tau), kappa);
        t.path_ = TargetPath::ClosedForm;
    } else {
        t.nu_ = SourceDensity::plain(bump);
        t.path_ = TargetPath::Quadrature;
        const QuadratureRule q = support_rule(t.nu_, opts.panels, opts.order);
        t.panels_ = opts.panels;
        t.order_ = opts.order;
        t.nodes_ = q.nodes;
        t.weighted_.resize(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) t.weighted_[j] = t.nu_(q.node(j)) * q.weights[j];
    }
    const MomentCheck mc = density_moments(t.nu_, t.nu_.moment_order());
    t.nu_norm_ = mc.l2_norm;
    if (mc.max_moment > moment_tolerance * mc.l2_norm)
        throw numerical_error("source density moments of degree <= " + std::to_string(mc.degree) + " do not vanish (" +
                              std::to_string(mc.max_moment) + ")");
    if (spec.family == KernelFamily::SurfaceSpline && t.nu_.moment_order() < spec.m - 1)
        throw domain_error("source density is not orthogonal to the polynomials annihilated by the kernel");
    return t;
}

// int nu(z) phi(x - z) dz by panel quadrature. The base rule's panels are cut at x (and at
// x +- support radius for compact kernels); the value is accepted when doubling the panel
// count changes it by at most 1e-6 relative.
inline double convolve_density(const KernelSpec& spec, const SourceDensity& nu, std::span<const double> x, const QuadratureRule& base)
{
    if (base.axes.empty() || base.dim != nu.dim()) throw parameter_error("convolution needs a tensor rule of matching dimension");
    const RadialKernel phi(spec);
    const double support = kernel_properties(spec).support_radius;
    // The fine rule halves every panel of the coarse one, cuts included.
    auto integrate = [&](bool halve) {
        std::vector<PanelRule1D> axes;
        for (int i = 0; i < base.dim; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const auto& ax = base.axes[k];
            std::vector<double> cuts{x[k]};
            if (std::isfinite(support)) {
                cuts.push_back(x[k] - support);
                cuts.push_back(x[k] + support);
            }
            std::vector<double> br = breakpoints_with_cuts(ax.breakpoints.front(), ax.breakpoints.back(), ax.breakpoints.size() - 1, cuts);
            if (halve) {
                std::vector<double> fine{br.front()};
                for (std::size_t j = 1; j < br.size(); ++j) {
                    fine.push_back(0.5 * (br[j - 1] + br[j]));
                    fine.push_back(br[j]);
                }
                br = std::move(fine);
            }
            axes.push_back(panel_rule(br, ax.order));
        }
        const QuadratureRule q = tensor_rule(std::move(axes));
        CompensatedSum s;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double v = nu(q.node(j));
            if (v != 0) s.add(q.weights[j] * v * phi(distance(x, q.node(j))));
        }
        return s.value();
    };
    const double coarse = integrate(false);
    const double fine = integrate(true);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) > 1e-6 * scale && std::abs(fine - coarse) > 1e-14)
        throw quadrature_error("convolution quadrature did not converge (relative change " + std::to_string(std::abs(fine - coarse) / scale) + ")");
    return fine;
}

inline nlohmann::ordered_json to_json(const TargetFunction& t)
{
    nlohmann::ordered_json j;
    j["kernel"] = to_string(t.spec());
    j["bump"] = {{"center", t.bump().center()}, {"half_width", t.bump().half_width()}, {"power", t.bump().power()}};
    j["path"] = std::string(path_name(t.path()));
    if (t.path() == TargetPath::Quadrature) j["quadrature"] = {{"panels", t.panels()}, {"order", t.order()}};
    j["density_moment_order"] = t.density().moment_order();
    return j;
}

}  // namespace kinterp
