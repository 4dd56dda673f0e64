#include <gtest/gtest.h>

#include <sstream>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracles.hpp"

using namespace kinterp;

namespace {

struct Fixture {
    TargetFunction target;
    PointSet ps;
    ReproConfig cfg;
};

Fixture surface_spline_setup(int level)
{
    Fixture s{make_target(KernelSpec::surface_spline(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1)), generate_point_set(Box::unit(1), level, 0.0, 1), {}};
    s.cfg = ReproConfig{5, 6, s.ps.quality()->fill};
    return s;
}

}  // namespace

TEST(QuasiInterp, RulePanelsRespectStencilWidth)
{
    const Fixture s = surface_spline_setup(6);
    const QuadratureRule q = quasi_rule(s.target.density(), s.cfg);
    const double width = 0.5 / static_cast<double>(q.panel_count());
    EXPECT_LE(width, 0.5 * s.cfg.radius() + 1e-15);
    EXPECT_EQ(q.order(), quasi_quadrature_order);
}

TEST(QuasiInterp, MomentCertificate)
{
    for (int level : {5, 7}) {
        const Fixture s = surface_spline_setup(level);
        const QuasiCoefficients qc = quasi_coefficients(s.target, s.ps, s.cfg, quasi_rule(s.target.density(), s.cfg));
        const MomentCertificate cert = moment_certificate(qc, s.ps, s.target);
        EXPECT_EQ(cert.degree, 3);
        EXPECT_TRUE(cert.passed()) << cert.max_residual << " > " << cert.bound;
        EXPECT_LE(qc.gamma, 5.0);
    }
}

// A_xi = int nu(y) a(xi, y) dy; the reference integrates the same local weights with an
// independent Gauss rule cut where stencils change, i.e. at xi +- K h.
TEST(QuasiInterp, CoefficientsMatchFineQuadrature)
{
    const Fixture s = surface_spline_setup(5);
    const QuasiCoefficients qc = quasi_coefficients(s.target, s.ps, s.cfg, quasi_rule(s.target.density(), s.cfg));
    const BucketGrid grid(s.ps);
    std::vector<double> breaks = oracle::linspace(0.25, 0.75, 8);
    for (double x : s.ps.coords())
        for (double c : {x - s.cfg.radius(), x + s.cfg.radius()})
            if (c > 0.25 && c < 0.75) breaks.push_back(c);
    std::vector<double> ref(s.ps.size(), 0.0);
    for (std::size_t i = 0; i < s.ps.size(); ++i) {
        ref[i] = oracle::integrate(
            [&](double y) {
                const LocalReproduction rep = build_local_weights(s.ps, grid, s.cfg, std::span<const double>(&y, 1));
                for (std::size_t k = 0; k < rep.indices.size(); ++k)
                    if (rep.indices[k] == i) return s.target.density()(std::span<const double>(&y, 1)) * rep.weights[k];
                return 0.0;
            },
            breaks, 12);
    }
    double scale = 0, diff = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        scale = std::max(scale, std::abs(ref[i]));
        diff = std::max(diff, std::abs(ref[i] - qc.a[i]));
    }
    // The library rule does not align with stencil changes; its error is a quadrature error of a
    // piecewise smooth integrand, not round-off.
    EXPECT_LE(diff, 0.05 * scale);
}

TEST(QuasiInterp, ApproximatesTarget)
{
    const Fixture s = surface_spline_setup(8);
    const QuasiCoefficients qc = quasi_coefficients(s.target, s.ps, s.cfg, quasi_rule(s.target.density(), s.cfg));
    std::vector<double> x;
    for (int i = 0; i <= 200; ++i) x.push_back(i / 200.0);
    const auto t = evaluate_quasi_interpolant(s.target.spec(), s.ps, qc.a, x);
    double err = 0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(t[i] - s.target.value(std::span<const double>(&x[i], 1))));
    EXPECT_LT(err, 1e-6);
}

TEST(QuasiInterp, CoefficientCsvAndErrors)
{
    std::ostringstream os;
    const std::vector<double> a = {0.5, -0.25};
    write_coefficients_csv(os, a);
    EXPECT_EQ(os.str(), "index,coefficient\n0,0.5\n1,-0.25\n");
    const Fixture s = surface_spline_setup(4);
    EXPECT_THROW(evaluate_quasi_interpolant(s.target.spec(), s.ps, a, std::vector<double>{0.5}), domain_error);
}
