#pragma once

// Quasi-interpolant T f = sum_xi A_xi phi(. - xi) + p with A_xi = int a(xi, z) nu(z) dz.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/interpolate.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/polyrepro.hpp"
#include "kinterp/quadrature.hpp"
#include "kinterp/target.hpp"

namespace kinterp {

inline constexpr int quasi_quadrature_order = 12;

// Tensor Gauss–Legendre panels over supp nu with panel width <= K h / 2.
inline QuadratureRule quasi_rule(const SourceDensity& nu, const ReproConfig& cfg, int order = quasi_quadrature_order,
                                 std::size_t max_nodes = 20'000'000)
{
    const Box box = nu.support();
    const double width = 0.5 * cfg.radius();
    if (!(width > 0)) throw parameter_error("stencil radius must be positive");
    std::vector<PanelRule1D> axes;
    for (int i = 0; i < box.dim(); ++i) {
        const auto panels = static_cast<std::size_t>(std::ceil(box.side(i) / width - 1e-12));
        axes.push_back(panel_rule(uniform_breakpoints(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)], std::max<std::size_t>(1, panels)), order));
    }
    return tensor_rule(std::move(axes), max_nodes);
}

struct QuasiCoefficients {
    std::vector<double> a;    // A_xi, indexed like the point set
    std::size_t panels = 0;
    int order = 0;
    std::size_t nodes = 0;
    int degree = 0;           // L
    double locality = 0;      // K
    double gamma = 0;         // max sum |a(xi, z)| over the quadrature nodes
};

inline QuasiCoefficients quasi_coefficients(const TargetFunction& target, const PointSet& ps, const ReproConfig& cfg, const QuadratureRule& quad)
{
    const SourceDensity& nu = target.density();
    if (quad.dim != ps.dim()) throw parameter_error("quadrature dimension does not match the point set");
    QuasiCoefficients out;
    out.panels = quad.panel_count();
    out.order = quad.order();
    out.nodes = quad.size();
    out.degree = cfg.degree;
    out.locality = cfg.locality;
    std::vector<CompensatedSum> sums(ps.size());
    const BucketGrid grid(ps);
    for (std::size_t j = 0; j < quad.size(); ++j) {
        const auto z = quad.node(j);
        const double v = nu(z);
        if (v == 0) continue;
        const LocalReproduction rep = build_local_weights(ps, grid, cfg, z);
        out.gamma = std::max(out.gamma, rep.lebesgue());
        const double vw = v * quad.weights[j];
        for (std::size_t k = 0; k < rep.indices.size(); ++k) sums[rep.indices[k]].add(rep.weights[k] * vw);
    }
    out.a.resize(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) out.a[i] = sums[i].value();
    return out;
}

struct MomentCertificate {
    int degree = -1;          // min(L, M)
    double max_residual = 0;  // max_p |sum_xi A_xi p(xi)|
    double bound = 0;         // 1e-8 ||nu||_2 * scale
    bool passed() const noexcept { return max_residual <= bound; }
};

inline constexpr double moment_certificate_tolerance = 1e-8;

// sum_xi A_xi p(xi) = int nu p, which vanishes for p of degree <= min(L, M). The basis is the
// domain-centered monomials scaled by the domain half-width; `scale` multiplies the tolerance.
inline MomentCertificate moment_certificate(const QuasiCoefficients& coeffs, const PointSet& ps, const TargetFunction& target, double scale = 1)
{
    MomentCertificate c;
    c.degree = std::min(coeffs.degree, target.density().moment_order());
    c.bound = moment_certificate_tolerance * target.density_norm() * scale;
    if (c.degree < 0) return c;
    const PolynomialBasis basis = interpolation_basis(ps.domain(), c.degree + 1);
    std::vector<CompensatedSum> sums(basis.size());
    std::vector<double> p(basis.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        basis.evaluate(ps.point(i), p);
        for (std::size_t j = 0; j < p.size(); ++j) sums[j].add(coeffs.a[i] * p[j]);
    }
    for (const auto& s : sums) c.max_residual = std::max(c.max_residual, std::abs(s.value()));
    return c;
}

// T f(x) = sum_xi A_xi phi(x - xi) + p(x); `poly` may be empty.
inline std::vector<double> evaluate_quasi_interpolant(const KernelSpec& spec, const PointSet& centers, std::span<const double> a,
                                                      const PolynomialBasis& poly, std::span<const double> poly_coeffs,
                                                      std::span<const double> points)
{
    if (a.size() != centers.size()) throw domain_error("coefficient count does not match the center count");
    return evaluate_kernel_expansion(spec, centers, a, &poly, poly_coeffs, points);
}

inline std::vector<double> evaluate_quasi_interpolant(const KernelSpec& spec, const PointSet& centers, std::span<const double> a,
                                                      std::span<const double> points)
{
    return evaluate_kernel_expansion(spec, centers, a, nullptr, {}, points);
}

// CSV keyed by center index.
inline void write_coefficients_csv(std::ostream& os, std::span<const double> a)
{
    os << "index,coefficient\n";
    os.precision(17);
    for (std::size_t i = 0; i < a.size(); ++i) os << i << ',' << a[i] << '\n';
    if (!os) throw io_error("failed writing coefficient CSV");
}

}  // namespace kinterp
