#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kinterp/kinterp.hpp"

using namespace kinterp;

namespace {

std::vector<double> uniform_probes(int d, std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> p(n * static_cast<std::size_t>(d));
    for (double& x : p) x = u(rng);
    return p;
}

}  // namespace

TEST(PolyRepro, ReproducesMonomialsAndConstants)
{
    for (int d : {1, 2}) {
        const PointSet ps = generate_point_set(Box::unit(d), d == 1 ? 6 : 4, 0.3, 21);
        ReproConfig cfg;
        cfg.degree = d == 1 ? 5 : 3;
        cfg.fill = ps.quality()->fill;
        const auto probes = uniform_probes(d, 200, 4);
        cfg.locality = choose_locality(ps, cfg, probes);
        for (std::size_t i = 0; i < 200; ++i) {
            const auto z = std::span<const double>(probes).subspan(i * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
            const LocalReproduction rep = build_local_weights(ps, cfg, z);
            EXPECT_LE(rep.residual, 1e-9);
            double s = 0;
            for (double w : rep.weights) s += w;
            EXPECT_NEAR(s, 1.0, 1e-10);
            // Direct check on a polynomial of full degree in original coordinates.
            double lhs = 0;
            for (std::size_t k = 0; k < rep.indices.size(); ++k) {
                const auto x = ps.point(rep.indices[k]);
                lhs += rep.weights[k] * std::pow(x[0] - 0.3, cfg.degree);
            }
            EXPECT_NEAR(lhs, std::pow(z[0] - 0.3, cfg.degree), 1e-9);
            for (std::size_t k = 0; k < rep.indices.size(); ++k) EXPECT_LE(distance(ps.point(rep.indices[k]), z), cfg.radius() * (1 + 1e-12));
        }
    }
}

// The weights are the minimal-norm solution: orthogonal to the null space of V^T.
TEST(PolyRepro, WeightsHaveMinimalNorm)
{
    const PointSet ps = generate_point_set(Box::unit(1), 5, 0.2, 3);
    ReproConfig cfg{3, 4, ps.quality()->fill};
    const double z[] = {0.4137};
    const LocalReproduction rep = build_local_weights(ps, cfg, z);
    const PolynomialBasis basis = local_basis(z, rep.radius, cfg.degree);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(rep.indices.size()), static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const auto row = basis.evaluate({rep.points.data() + i, 1});
        for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = row[static_cast<std::size_t>(j)];
    }
    const Eigen::Map<const Eigen::VectorXd> a(rep.weights.data(), v.rows());
    // a lies in range(V), so the projection onto range(V) leaves it unchanged.
    const Eigen::MatrixXd q = v.householderQr().householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
    EXPECT_LE((a - q * (q.transpose() * a)).norm(), 1e-12 * a.norm());
}

TEST(PolyRepro, LebesgueConstantStaysBoundedUnderRefinement)
{
    double previous = 0;
    for (int level : {4, 5, 6, 7}) {
        const PointSet ps = generate_point_set(Box::unit(1), level, 0.2, 8);
        ReproConfig cfg{5, 2, ps.quality()->fill};
        const auto probes = uniform_probes(1, 300, 9);
        cfg.locality = choose_locality(ps, cfg, probes);
        const double gamma = stability_constant(ps, cfg, probes);
        EXPECT_LT(gamma, 5.0);
        if (previous > 0) EXPECT_LT(gamma, 2 * previous);
        previous = gamma;
    }
}

TEST(PolyRepro, StencilErrors)
{
    const PointSet ps = generate_point_set(Box::unit(1), 4, 0.0, 1);
    const double z[] = {0.5};
    EXPECT_THROW(build_local_weights(ps, ReproConfig{5, 1, ps.quality()->fill}, z), stencil_error);
    EXPECT_THROW(build_local_weights(ps, ReproConfig{5, 0, ps.quality()->fill}, z), parameter_error);
    EXPECT_THROW(choose_locality(generate_point_set(Box::unit(1), 2, 0.0, 1), ReproConfig{9, 2, 0.25}, std::vector<double>{0.5}), stencil_error);
}

TEST(PolyRepro, ChoosesSmallestAdequateLocality)
{
    const PointSet ps = generate_point_set(Box::unit(1), 6, 0.0, 1);
    EXPECT_EQ(choose_locality(ps, ReproConfig{1, 2, ps.quality()->fill}, uniform_probes(1, 50, 2)), 2);
    const double k = choose_locality(ps, ReproConfig{5, 2, ps.quality()->fill}, uniform_probes(1, 50, 2));
    EXPECT_GE(k, 3);
}

TEST(PolyRepro, AuditCsv)
{
    const PointSet ps = generate_point_set(Box::unit(2), 3, 0.1, 1);
    const auto rows = audit_reproduction(ps, ReproConfig{2, 3, ps.quality()->fill}, uniform_probes(2, 5, 1));
    ASSERT_EQ(rows.size(), 5u);
    std::ostringstream os;
    write_audit_csv(os, rows, 2);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "z0,z1,stencil_size,lebesgue,residual");
    for (const auto& r : rows) EXPECT_LE(r.constant_defect, 1e-10);
}
