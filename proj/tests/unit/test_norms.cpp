#include <gtest/gtest.h>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracle_suite.hpp"

using namespace kinterp;

TEST(Norms, FornbergReproducesClassicalStencils)
{
    const std::vector<double> x3 = {-1, 0, 1};
    const auto w2 = fornberg_weights(0, x3, 2);
    EXPECT_NEAR(w2[0], 1, 1e-14);
    EXPECT_NEAR(w2[1], -2, 1e-14);
    EXPECT_NEAR(w2[2], 1, 1e-14);
    const std::vector<double> x5 = {-2, -1, 0, 1, 2};
    const auto w1 = fornberg_weights(0, x5, 1);
    EXPECT_NEAR(w1[0], 1.0 / 12, 1e-14);
    EXPECT_NEAR(w1[1], -8.0 / 12, 1e-14);
    EXPECT_NEAR(w1[3], 8.0 / 12, 1e-14);
    const std::vector<double> x4 = {0, 1, 2, 3};
    const auto f = fornberg_weights(0, x4, 1);
    EXPECT_NEAR(f[0], -11.0 / 6, 1e-14);
    EXPECT_NEAR(f[3], 1.0 / 3, 1e-14);
}

TEST(Norms, SeminormsOfSineMatchAnalyticIntegrals)
{
    const auto c = oracle::check_sobolev();
    EXPECT_LE(c.error, c.tolerance);
}

TEST(Norms, FourthOrderConvergence)
{
    double previous = 0;
    for (std::size_t n : {129, 257, 513}) {
        const GridFunction gf = sample_grid(Box({0.1}, {0.9}), {n}, [](std::span<const double> x) { return std::sin(7 * x[0]); });
        const double ref = std::sqrt(oracle::sin_seminorm_squared(7, 3, 0.1, 0.9));
        const double err = std::abs(sobolev_seminorm_grid(gf, 3) - ref);
        if (previous > 0) EXPECT_GT(previous / err, 3.0);
        previous = err;
    }
}

TEST(Norms, TwoDimensionalMixedDerivatives)
{
    // u = sin(a x) sin(b y) on [0, 1]^2: |u|_1^2 = a^2 Sx' Sy + b^2 Sx Sy'.
    const double a = 3, b = 2;
    const GridFunction gf = sample_grid(Box::unit(2), {257, 257}, [&](std::span<const double> x) { return std::sin(a * x[0]) * std::sin(b * x[1]); });
    const auto S = [](double w, int k) { return oracle::sin_seminorm_squared(w, k, 0, 1); };
    const double h1 = S(a, 1) * S(b, 0) + S(a, 0) * S(b, 1);
    EXPECT_NEAR(sobolev_seminorm_squared(gf, 1), h1, 1e-5 * h1);
    // |u|_2^2 counts the mixed derivative twice (multinomial weight 2).
    const double h2 = S(a, 2) * S(b, 0) + 2 * S(a, 1) * S(b, 1) + S(a, 0) * S(b, 2);
    EXPECT_NEAR(sobolev_seminorm_squared(gf, 2), h2, 1e-5 * h2);
}

TEST(Norms, FractionalOrderInterpolatesNeighbours)
{
    const GridFunction gf = sample_grid(Box::unit(1), {257}, [](std::span<const double> x) { return std::cos(4 * x[0]); });
    const double n1 = sobolev_norm_grid(gf, 1), n2 = sobolev_norm_grid(gf, 2);
    EXPECT_NEAR(sobolev_norm_grid(gf, 1.25), std::pow(n1, 0.75) * std::pow(n2, 0.25), 1e-13 * n2);
    const std::vector<double> sig = {0, 1, 1.25, 2};
    const auto all = sobolev_norms_grid(gf, sig);
    EXPECT_EQ(all[1], n1);
    EXPECT_EQ(all[3], n2);
}

TEST(Norms, Errors)
{
    GridFunction small{Box::unit(1), {9}, std::vector<double>(9, 1.0)};
    EXPECT_THROW(sobolev_seminorm_squared(small, 3), resolution_error);
    EXPECT_THROW(sobolev_norm_grid(small, -1), parameter_error);
    GridFunction tiny{Box::unit(1), {5}, std::vector<double>(5, 1.0)};
    EXPECT_THROW(sobolev_seminorm_squared(tiny, 0), resolution_error);
    GridFunction mismatched{Box::unit(1), {17}, std::vector<double>(9, 1.0)};
    EXPECT_THROW(sobolev_seminorm_squared(mismatched, 0), domain_error);
}

TEST(Norms, RateFitRecoversPowerLaws)
{
    const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
    const auto e = oracle::power_law(h, 2.0, 3.5);
    const RateFit fit = fit_convergence_rate(h, e);
    EXPECT_NEAR(fit.slope, 3.5, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(2.0), 1e-12);
    EXPECT_LE(fit.residual, 1e-12);
}

TEST(Norms, RateFitSkipsUnusablePoints)
{
    const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125, 0.00625};
    std::vector<double> e = oracle::power_law(h, 1.0, 2.0);
    e[1] = 0;
    e[3] = std::numeric_limits<double>::quiet_NaN();
    const RateFit fit = fit_convergence_rate(h, e);
    EXPECT_EQ(fit.used, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(fit.excluded, (std::vector<std::size_t>{1, 3}));
    EXPECT_NEAR(fit.slope, 2.0, 1e-12);
    e[0] = -1;
    EXPECT_THROW(fit_convergence_rate(h, e), insufficient_data_error);
}

TEST(Norms, NoisyRegressionMatchesOracle)
{
    const std::vector<double> h = {0.2, 0.1, 0.05, 0.025, 0.0125};
    const std::vector<double> e = {0.11, 0.0071, 0.00042, 0.000031, 0.0000018};
    EXPECT_NEAR(fit_convergence_rate(h, e).slope, oracle::loglog_fit(h, e).first, 1e-12);
}
