#include <gtest/gtest.h>

#include "kinterp/oracle_suite.hpp"

using namespace kinterp;

// The oracles themselves, against closed forms that involve neither the library nor each other.

TEST(Oracles, GaussRuleIntegratesPolynomialsExactly)
{
    const auto g = oracle::gauss(10);
    for (int p = 0; p < 20; ++p) {
        double s = 0;
        for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], p);
        EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
    }
}

TEST(Oracles, BesselIntegralAgainstHalfIntegerForm)
{
    for (double r : {0.1, 1.0, 5.0}) {
        // K_{1/2}(r) = sqrt(pi / (2 r)) e^{-r}
        EXPECT_NEAR(oracle::bessel_k(0.5, r), std::sqrt(std::numbers::pi / (2 * r)) * std::exp(-r), 1e-13);
        EXPECT_NEAR(oracle::matern(1.5, r), oracle::matern_three_halves(r), 1e-13);
    }
}

TEST(Oracles, BetaAndWendland)
{
    EXPECT_NEAR(oracle::beta(2, 4), 0.05, 1e-15);
    EXPECT_NEAR(oracle::generalized_wendland(1, 3, 0.0), oracle::generalized_wendland_at_zero(1, 3), 1e-15);
    // k = 1, ell = 3: int_r^1 t (1 - t)^3 dt in closed form.
    const double r = 0.37;
    const double closed = std::pow(1 - r, 4) * (1 + 4 * r) / 20;
    EXPECT_NEAR(oracle::generalized_wendland(1, 3, r), closed, 1e-15);
}

TEST(Oracles, NaturalSplineReproducesLinesAndHasZeroEndCurvature)
{
    const oracle::NaturalCubicSpline line({0, 0.3, 0.5, 1}, {1, 1.6, 2, 3});
    for (double t : {0.0, 0.1, 0.42, 0.99}) EXPECT_NEAR(line(t), 1 + 2 * t, 1e-14);
    const oracle::NaturalCubicSpline s({0, 1, 2, 3}, {0, 1, 0, 1});
    const double h = 1e-4;
    EXPECT_NEAR((s(2 * h) - 2 * s(h) + s(0)) / (h * h), 0.0, 1e-3);
}

TEST(Oracles, SineIntegrals)
{
    EXPECT_NEAR(oracle::sin_seminorm_squared(std::numbers::pi, 0, 0, 1), 0.5, 1e-15);
    EXPECT_NEAR(oracle::sin_seminorm_squared(std::numbers::pi, 1, 0, 1), std::pow(std::numbers::pi, 2) / 2, 1e-13);
    EXPECT_NEAR(oracle::sin_seminorm_squared(2.0, 2, 0.1, 0.7),
                oracle::integrate([](double x) { return std::pow(4 * std::sin(2 * x), 2); }, oracle::linspace(0.1, 0.7, 4)), 1e-13);
}

TEST(Oracles, CosPowerDerivativesAgainstFiniteDifferences)
{
    const double t = 0.3;
    const auto f = [](double x) { return std::pow(std::cos(x), 6); };
    const double h1 = 1e-5, h2 = 1e-4;
    EXPECT_NEAR(oracle::cos_power_derivative(6, t, 1), (f(t + h1) - f(t - h1)) / (2 * h1), 1e-8);
    EXPECT_NEAR(oracle::cos_power_derivative(6, t, 2), (f(t + h2) - 2 * f(t) + f(t - h2)) / (h2 * h2), 1e-5);
}

TEST(Oracles, DoubleIntegralOfConstantKernel)
{
    const double v = oracle::double_integral([](double) { return 1.0; }, [](double r) { return r; }, 0, 1, 8, 10);
    EXPECT_NEAR(v, 1.0 / 3, 1e-14);
}

TEST(Oracles, SuiteAgainstLibrary)
{
    for (const auto& nc : oracle::all_checks()) {
        const auto c = nc.run();
        EXPECT_LE(c.error, c.tolerance) << c.name;
    }
}
