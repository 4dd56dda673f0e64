#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracle_suite.hpp"

using namespace kinterp;

TEST(Kernels, MaternHalfIntegerMatchesClosedForm)
{
    const auto c = oracle::check_matern();
    EXPECT_LE(c.error, c.tolerance);
}

TEST(Kernels, MaternGeneralOrderMatchesBesselIntegral)
{
    const auto c = oracle::check_bessel();
    EXPECT_LE(c.error, c.tolerance);
}

TEST(Kernels, MaternFrozenValues)
{
    // r^nu K_nu(r) at 30 digits.
    EXPECT_NEAR(matern_value(0.3, 0.5), 0.79314344750896408458, 1e-13);
    EXPECT_NEAR(matern_value(1.7, 1.0), 1.138717809179935705, 1e-13);
    EXPECT_NEAR(matern_value(2.25, 3.0), 0.84499584921487668826, 1e-13);
    EXPECT_NEAR(matern_value(0.7, 0.0), std::pow(2.0, -0.3) * std::tgamma(0.7), 1e-15);
}

TEST(Kernels, WendlandMatchesIntegralForm)
{
    const auto c = oracle::check_wendland();
    EXPECT_LE(c.error, c.tolerance);
    EXPECT_NEAR(generalized_wendland_value(1, 3, 0.5), 0.009375, 1e-16);
    EXPECT_NEAR(generalized_wendland_value(3, 5, 0.3), 0.000016933583023989899608, 1e-18);
    EXPECT_NEAR(generalized_wendland_value(1, 3, 0.0), oracle::beta(2, 4), 1e-16);
    EXPECT_EQ(generalized_wendland_value(2, 3, 1.0), 0.0);
    EXPECT_EQ(generalized_wendland_value(2, 3, 1.5), 0.0);
}

TEST(Kernels, SurfaceSplineForms)
{
    EXPECT_DOUBLE_EQ(kernel_value(KernelSpec::surface_spline(1, 2), 0.5), 0.125);
    EXPECT_DOUBLE_EQ(kernel_value(KernelSpec::surface_spline(1, 1), 0.5), -0.5);
    // d = 2, m = 2: thin-plate r^2 log r with a positive sign.
    EXPECT_DOUBLE_EQ(kernel_value(KernelSpec::surface_spline(2, 2), 2.0), 4 * std::log(2.0));
    EXPECT_EQ(kernel_value(KernelSpec::surface_spline(2, 2), 0.0), 0.0);
}

// The sign convention makes the quadratic form positive on coefficient vectors that annihilate
// polynomials of degree < m.
TEST(Kernels, SurfaceSplineConditionallyPositiveDefinite)
{
    for (int d : {1, 2, 3})
        for (int m : {1, 2, 3}) {
            if (2 * m <= d) continue;
            const PointSet ps = generate_point_set(Box::unit(d), d == 1 ? 4 : 2, 0.3, 5);
            const SaddleSystem sys = assemble_system(KernelSpec::surface_spline(d, m), ps);
            EXPECT_GT(constrained_min_eigenvalue(sys), 0) << "d=" << d << " m=" << m;
        }
}

TEST(Kernels, Properties)
{
    const auto p = kernel_properties(KernelSpec::generalized_wendland(2, 1, 3));
    EXPECT_DOUBLE_EQ(p.native_exponent, 2.5);
    EXPECT_DOUBLE_EQ(p.homogeneity, 3.0);
    EXPECT_EQ(p.cpd_order, 0);
    EXPECT_DOUBLE_EQ(p.support_radius, 1.0);
    const auto s = kernel_properties(KernelSpec::surface_spline(1, 2));
    EXPECT_EQ(s.cpd_order, 2);
    EXPECT_DOUBLE_EQ(s.homogeneity, 3.0);
}

TEST(Kernels, FundamentalSolutionScale)
{
    // |x|^3'''' = 12 delta; (1 - D^2)^2 of the Matérn 3/2 kernel = 2 sqrt(2 pi) delta.
    EXPECT_NEAR(fundamental_solution_scale(KernelSpec::surface_spline(1, 2)), 1.0 / 12, 1e-15);
    EXPECT_NEAR(fundamental_solution_scale(KernelSpec::matern(1, 2)), 1 / (2 * std::sqrt(2 * std::numbers::pi)), 1e-15);
    // Thin plate in 2-d: Delta^2 (r^2 log r) = 8 pi delta.
    EXPECT_NEAR(fundamental_solution_scale(KernelSpec::surface_spline(2, 2)), 1 / (8 * std::numbers::pi), 1e-15);
    EXPECT_THROW(fundamental_solution_scale(KernelSpec::generalized_wendland(2, 1, 3)), error);
}

TEST(Kernels, FourierSymbol)
{
    const auto s = fourier_symbol_value(KernelSpec::matern(1, 2), 2.0);
    EXPECT_DOUBLE_EQ(s.lower, 1.0 / 25);
    EXPECT_TRUE(s.exact);
    EXPECT_THROW(fourier_symbol_value(KernelSpec::surface_spline(1, 2), 0.0), domain_error);
    EXPECT_FALSE(fourier_symbol_value(KernelSpec::generalized_wendland(2, 1, 3), 1.0).exact);
}

TEST(Kernels, SpecParsingRoundTrip)
{
    for (const char* text : {"matern d=1 tau=2", "surface_spline d=2 m=2", "generalized_wendland d=2 k=1 ell=3"}) {
        const KernelSpec s = parse_kernel_spec(text);
        EXPECT_EQ(to_string(s), text);
    }
    EXPECT_THROW(parse_kernel_spec("matern tau=2"), parameter_error);
    EXPECT_THROW(parse_kernel_spec("gaussian d=1"), parameter_error);
    EXPECT_THROW(parse_kernel_spec("matern d=1 m=2"), parameter_error);
    EXPECT_THROW(parse_kernel_spec("matern d=2 tau=0.5"), parameter_error);
    EXPECT_THROW(parse_kernel_spec("surface_spline d=2 m=1 extra"), parameter_error);
}

TEST(Kernels, RejectsNegativeRadius)
{
    EXPECT_THROW(kernel_value(KernelSpec::matern(1, 2), -1.0), domain_error);
    EXPECT_THROW(hs_value(3, 0.0), domain_error);
}

TEST(Kernels, RadialKernelAgreesWithKernelValue)
{
    for (const KernelSpec& s : {KernelSpec::matern(1, 2), KernelSpec::matern(2, 1.8), KernelSpec::surface_spline(2, 2), KernelSpec::generalized_wendland(2, 1, 3)}) {
        const RadialKernel k(s);
        for (double r : {0.0, 0.1, 0.7, 1.3}) EXPECT_NEAR(k(r), kernel_value(s, r), 1e-14 * (1 + std::abs(kernel_value(s, r))));
    }
}
