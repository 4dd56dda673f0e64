#include <gtest/gtest.h>

#include "kinterp/kinterp.hpp"
#include "kinterp/oracles.hpp"

using namespace kinterp;

namespace {

Interpolant interpolate_target(const TargetFunction& t, const PointSet& ps)
{
    return solve_interpolant(assemble_system(t.spec(), ps), t.values(ps.coords()));
}

}  // namespace

// |f|_N^2 = int int nu nu phi, with the double integral done independently.
TEST(NativeError, TargetNormMatchesDoubleIntegral)
{
    const TargetFunction t = make_target(KernelSpec::matern(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1));
    const PointSet ps = generate_point_set(Box::unit(1), 4, 0.0, 1);
    const NativeError e = target_error_native(t, interpolate_target(t, ps), native_error_rule(t, ps));
    const auto nu = [&](double x) { return t.density()(std::span<const double>(&x, 1)); };
    const double ref = oracle::double_integral(nu, oracle::matern_three_halves, 0.25, 0.75, 32, 16);
    EXPECT_NEAR(e.target_norm2, ref, 1e-10 * std::abs(ref));
}

TEST(NativeError, AgreesWithOracleInnerProduct)
{
    const TargetFunction t = make_target(KernelSpec::surface_spline(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1));
    const PointSet ps = generate_point_set(Box::unit(1), 5, 0.2, 3);
    const Interpolant s = interpolate_target(t, ps);
    const NativeError e = target_error_native(t, s, native_error_rule(t, ps));
    std::vector<double> breaks = oracle::linspace(0.25, 0.75, 16);
    for (double x : ps.coords())
        if (x > 0.25 && x < 0.75) breaks.push_back(x);
    const double inner = oracle::integrate(
        [&](double x) {
            const std::span<const double> p(&x, 1);
            return t.density()(p) * (t.value(p) - evaluate_interpolant(s, p)[0]);
        },
        breaks, 20);
    EXPECT_NEAR(e.inner, inner, 1e-9 * e.target_norm2);
    EXPECT_GT(e.value, 0);
}

TEST(NativeError, PythagorasAgainstDifferenceRoute)
{
    const TargetFunction t = make_target(KernelSpec::matern(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1));
    const PointSet ps = generate_point_set(Box::unit(1), 3, 0.0, 1);
    const Interpolant s = interpolate_target(t, ps);
    const QuadratureRule rule = native_error_rule(t, ps);
    const NativeError e = target_error_native(t, s, rule);
    // |f|^2 = |I f|^2 + |f - I f|^2
    const double lhs = e.target_norm2;
    const double rhs = std::pow(native_seminorm_discrete(s), 2) + e.inner;
    EXPECT_NEAR(lhs, rhs, 1e-8 * lhs);
    EXPECT_NEAR(native_error_by_difference(t, s, rule), e.value, 1e-4 * e.value);
}

TEST(NativeError, ErrorDecreasesUnderRefinement)
{
    const TargetFunction t = make_target(KernelSpec::surface_spline(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1));
    double previous = INFINITY;
    for (int level : {3, 4, 5, 6}) {
        const PointSet ps = generate_point_set(Box::unit(1), level, 0.0, 1);
        const double v = target_error_native_seminorm(t, interpolate_target(t, ps), native_error_rule(t, ps));
        EXPECT_LT(v, previous);
        previous = v;
    }
}

TEST(NativeError, Ratio)
{
    const TargetFunction t = make_target(KernelSpec::matern(1, 2), CosineBump({0.5}, {0.25}, 12), Box::unit(1));
    const PointSet ps = generate_point_set(Box::unit(1), 4, 0.0, 1);
    const Interpolant s = interpolate_target(t, ps);
    const auto r = e_ratio(t, s, 1e-3, native_error_rule(t, ps));
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(*r, 0);
    EXPECT_EQ(*e_ratio(t, s, 0.0, native_error_rule(t, ps)), 0.0);
}
