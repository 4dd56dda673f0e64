#pragma once

// Local polynomial reproduction: for every z, weights a(xi, z) on the stencil B(z, K h) with
// sum_xi a(xi, z) p(xi) = p(z) for all p of degree <= L, chosen with minimal l2 norm.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/polynomial.hpp"

namespace kinterp {

struct ReproConfig {
    int degree = 0;              // L
    double locality = 2;         // K
    double fill = 0;             // h
    double max_condition = 1e8;  // local Vandermonde condition accepted when choosing K
    double radius() const noexcept { return locality * fill; }
};

struct LocalReproduction {
    std::vector<double> z;
    double radius = 0;
    std::vector<std::size_t> indices;  // stencil members, |xi - z| <= radius
    std::vector<double> points;        // their coordinates, row-major
    std::vector<double> weights;
    double condition = 0;              // of the scaled local Vandermonde matrix
    double residual = 0;

    double lebesgue() const
    {
        double s = 0;
        for (double w : weights) s += std::abs(w);
        return s;
    }
};

inline constexpr double reproduction_tolerance = 1e-9;

// Basis ((x - z) / radius)^alpha used for the local problem and the residual check.
inline PolynomialBasis local_basis(std::span<const double> z, double radius, int degree)
{
    return PolynomialBasis(static_cast<int>(z.size()), degree, std::vector<double>(z.begin(), z.end()), radius);
}

// max over the local monomials of |sum a p(xi) - p(z)|.
inline double check_reproduction(const LocalReproduction& rep, int degree)
{
    const PolynomialBasis basis = local_basis(rep.z, rep.radius, degree);
    const auto d = rep.z.size();
    std::vector<double> pz = basis.evaluate(rep.z);
    std::vector<CompensatedSum> sums(basis.size());
    std::vector<double> p(basis.size());
    for (std::size_t i = 0; i < rep.weights.size(); ++i) {
        basis.evaluate({rep.points.data() + i * d, d}, p);
        for (std::size_t j = 0; j < p.size(); ++j) sums[j].add(rep.weights[i] * p[j]);
    }
    double r = 0;
    for (std::size_t j = 0; j < sums.size(); ++j) r = std::max(r, std::abs(sums[j].value() - pz[j]));
    return r;
}

namespace detail {

struct LocalSolve {
    LocalReproduction rep;
    bool unisolvent = false;
};

inline LocalSolve solve_local(const PointSet& ps, const BucketGrid& grid, const ReproConfig& cfg, std::span<const double> z)
{
    LocalSolve out;
    LocalReproduction& rep = out.rep;
    rep.z.assign(z.begin(), z.end());
    rep.radius = cfg.radius();
    std::vector<std::pair<std::size_t, double>> found;
    grid.for_each_within(z, rep.radius, [&](std::size_t i, double r2) { found.emplace_back(i, r2); });
    std::sort(found.begin(), found.end());
    const auto d = static_cast<std::size_t>(ps.dim());
    for (const auto& [i, r2] : found) {
        rep.indices.push_back(i);
        const auto p = ps.point(i);
        rep.points.insert(rep.points.end(), p.begin(), p.end());
    }
    const PolynomialBasis basis = local_basis(z, rep.radius, cfg.degree);
    const auto n = static_cast<Eigen::Index>(rep.indices.size());
    const auto N = static_cast<Eigen::Index>(basis.size());
    if (n < N) {
        rep.condition = std::numeric_limits<double>::infinity();
        return out;
    }
    Eigen::MatrixXd v(n, N);
    std::vector<double> row(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < n; ++i) {
        basis.evaluate({rep.points.data() + static_cast<std::size_t>(i) * d, d}, row);
        for (Eigen::Index j = 0; j < N; ++j) v(i, j) = row[static_cast<std::size_t>(j)];
    }
    // V^T a = p(z) with p(z) = e_0 in the basis centered at z; min-norm solution a = U S^{-1} W^T e_0.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    rep.condition = s(N - 1) > 0 ? s(0) / s(N - 1) : std::numeric_limits<double>::infinity();
    if (!(s(N - 1) > 1e-12 * s(0))) return out;
    out.unisolvent = true;
    const Eigen::VectorXd pz = Eigen::Map<const Eigen::VectorXd>(basis.evaluate(z).data(), N);
    const Eigen::VectorXd coeffs = svd.matrixV().transpose() * pz;
    const Eigen::VectorXd a = svd.matrixU() * coeffs.cwiseQuotient(s);
    rep.weights.assign(a.data(), a.data() + n);
    rep.residual = check_reproduction(rep, cfg.degree);
    return out;
}

}  // namespace detail

inline LocalReproduction build_local_weights(const PointSet& ps, const BucketGrid& grid, const ReproConfig& cfg, std::span<const double> z)
{
    if (cfg.degree < 0) throw parameter_error("reproduction degree must be nonnegative");
    if (!(cfg.radius() > 0)) throw parameter_error("stencil radius K h must be positive");
    auto sol = detail::solve_local(ps, grid, cfg, z);
    if (!sol.unisolvent)
        throw stencil_error("stencil of " + std::to_string(sol.rep.indices.size()) + " points in B(z, " + std::to_string(cfg.radius()) +
                            ") is not unisolvent for degree " + std::to_string(cfg.degree) + "; increase K");
    if (sol.rep.residual > reproduction_tolerance)
        throw conditioning_error("local reproduction residual " + std::to_string(sol.rep.residual) + " exceeds tolerance (Vandermonde condition " +
                                 std::to_string(sol.rep.condition) + ")");
    return std::move(sol.rep);
}

inline LocalReproduction build_local_weights(const PointSet& ps, const ReproConfig& cfg, std::span<const double> z)
{
    const BucketGrid grid(ps);
    return build_local_weights(ps, grid, cfg, z);
}

// Empirical Gamma: max over the probes of sum |a(xi, z)|.
inline double stability_constant(const PointSet& ps, const ReproConfig& cfg, std::span<const double> probes)
{
    const BucketGrid grid(ps);
    const auto d = static_cast<std::size_t>(ps.dim());
    double gamma = 0;
    for (std::size_t i = 0; i + d <= probes.size(); i += d) gamma = std::max(gamma, build_local_weights(ps, grid, cfg, probes.subspan(i, d)).lebesgue());
    return gamma;
}

inline constexpr double locality_candidates[] = {2, 3, 4, 6, 8, 12};

// Smallest K in {2, 3, 4, 6, 8, 12} whose stencils are unisolvent at every probe with Vandermonde
// condition below cfg.max_condition.
inline double choose_locality(const PointSet& ps, ReproConfig cfg, std::span<const double> probes)
{
    const BucketGrid grid(ps);
    const auto d = static_cast<std::size_t>(ps.dim());
    for (double k : locality_candidates) {
        cfg.locality = k;
        bool ok = true;
        for (std::size_t i = 0; ok && i + d <= probes.size(); i += d) {
            const auto sol = detail::solve_local(ps, grid, cfg, probes.subspan(i, d));
            ok = sol.unisolvent && sol.rep.condition < cfg.max_condition && sol.rep.residual <= reproduction_tolerance;
        }
        if (ok) return k;
    }
    throw stencil_error("no locality factor in {2, 3, 4, 6, 8, 12} gives unisolvent stencils for degree " + std::to_string(cfg.degree));
}

struct ReproAuditRow {
    std::vector<double> z;
    std::size_t stencil_size = 0;
    double lebesgue = 0;
    double residual = 0;
    double constant_defect = 0;  // |sum a - 1|
};

inline std::vector<ReproAuditRow> audit_reproduction(const PointSet& ps, const ReproConfig& cfg, std::span<const double> probes)
{
    const BucketGrid grid(ps);
    const auto d = static_cast<std::size_t>(ps.dim());
    std::vector<ReproAuditRow> rows;
    for (std::size_t i = 0; i + d <= probes.size(); i += d) {
        const auto rep = build_local_weights(ps, grid, cfg, probes.subspan(i, d));
        ReproAuditRow row;
        row.z = rep.z;
        row.stencil_size = rep.indices.size();
        row.lebesgue = rep.lebesgue();
        row.residual = rep.residual;
        CompensatedSum s;
        for (double w : rep.weights) s.add(w);
        row.constant_defect = std::abs(s.value() - 1);
        rows.push_back(std::move(row));
    }
    return rows;
}

// CSV: z coordinates, stencil size, sum |a|, residual.
inline void write_audit_csv(std::ostream& os, const std::vector<ReproAuditRow>& rows, int d)
{
    for (int i = 0; i < d; ++i) os << "z" << i << ',';
    os << "stencil_size,lebesgue,residual\n";
    os.precision(17);
    for (const auto& r : rows) {
        for (double c : r.z) os << c << ',';
        os << r.stencil_size << ',' << r.lebesgue << ',' << r.residual << '\n';
    }
    if (!os) throw io_error("failed writing reproduction audit CSV");
}

}  // namespace kinterp
