#pragma once

// Kernel interpolation with the polynomial side conditions of a conditionally positive
// definite kernel:
//
//   [ Phi  P ] [a]   [f|Xi]
//   [ P^T  0 ] [b] = [ 0  ]
//
// with Phi_{ij} = phi(|xi_i - xi_j|) and P_{ij} = p_j(xi_i), p_j spanning polynomials of degree < m0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/kernels.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/polynomial.hpp"

namespace kinterp {

inline PolynomialBasis interpolation_basis(const Box& domain, int cpd_order)
{
    std::vector<double> center(static_cast<std::size_t>(domain.dim()));
    for (int i = 0; i < domain.dim(); ++i) center[static_cast<std::size_t>(i)] = domain.center(i);
    return PolynomialBasis(domain.dim(), cpd_order - 1, std::move(center), domain.max_half_width());
}

struct SaddleSystem {
    KernelSpec spec;
    KernelProps props;
    PointSet centers;
    PolynomialBasis basis;
    Eigen::MatrixXd phi;   // n x n collocation matrix
    Eigen::MatrixXd poly;  // n x N polynomial block (N = 0 for positive definite kernels)

    Eigen::Index n() const noexcept { return phi.rows(); }
    Eigen::Index poly_size() const noexcept { return poly.cols(); }

    Eigen::MatrixXd matrix() const
    {
        const Eigen::Index n_ = n(), N = poly_size();
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_ + N, n_ + N);
        a.topLeftCorner(n_, n_) = phi;
        a.topRightCorner(n_, N) = poly;
        a.bottomLeftCorner(N, n_) = poly.transpose();
        return a;
    }
};

inline void check_distinct(const PointSet& ps)
{
    if (ps.size() < 2) return;
    BucketGrid grid(ps);
    const double scale = ps.domain().max_half_width();
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (grid.nearest_distance(ps.point(i), i) <= 1e-14 * scale)
            throw geometry_error("point " + std::to_string(i) + " is repeated in the center set");
}

inline SaddleSystem assemble_system(const KernelSpec& spec, const PointSet& ps)
{
    validate(spec);
    if (ps.dim() != spec.dim) throw parameter_error("kernel dimension does not match the point set");
    if (ps.size() == 0) throw domain_error("empty center set");
    check_distinct(ps);

    SaddleSystem sys;
    sys.spec = spec;
    sys.props = kernel_properties(spec);
    sys.centers = ps;
    sys.basis = interpolation_basis(ps.domain(), sys.props.cpd_order);

    const RadialKernel phi(spec);
    const auto n = static_cast<Eigen::Index>(ps.size());
    sys.phi.resize(n, n);
    const double phi0 = phi(0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        sys.phi(j, j) = phi0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = phi(distance(ps.point(static_cast<std::size_t>(i)), ps.point(static_cast<std::size_t>(j))));
            sys.phi(i, j) = v;
            sys.phi(j, i) = v;
        }
    }
    const auto N = static_cast<Eigen::Index>(sys.basis.size());
    sys.poly.resize(n, N);
    std::vector<double> row(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < n; ++i) {
        sys.basis.evaluate(ps.point(static_cast<std::size_t>(i)), row);
        for (Eigen::Index j = 0; j < N; ++j) sys.poly(i, j) = row[static_cast<std::size_t>(j)];
    }
    if (N > 0) {
        if (n < N)
            throw unisolvency_error("center set has " + std::to_string(n) + " points, fewer than the " + std::to_string(N) +
                                    " needed for polynomials of degree " + std::to_string(sys.props.cpd_order - 1));
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.poly);
        qr.setThreshold(1e-10);
        if (qr.rank() < N)
            throw unisolvency_error("center set is not unisolvent for polynomials of degree " +
                                    std::to_string(sys.props.cpd_order - 1));
    }
    return sys;
}

// Factorized saddle system; reused for several right-hand sides.
class SaddleSolver {
public:
    explicit SaddleSolver(const SaddleSystem& sys) : sys_(&sys), matrix_(sys.matrix()), lu_(matrix_) {}

    const SaddleSystem& system() const noexcept { return *sys_; }
    double condition_estimate() const noexcept { return lu_.condition_estimate(); }

    // Solves with one step of iterative refinement and returns the scaled residual
    // ||A x - rhs||_inf / ||rhs||_inf through `scaled_residual`.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double* scaled_residual = nullptr) const
    {
        Eigen::VectorXd x = lu_.solve(rhs);
        Eigen::VectorXd r = rhs - matrix_ * x;
        x += lu_.solve(r);
        r = rhs - matrix_ * x;
        const double rhs_norm = rhs.cwiseAbs().maxCoeff();
        const double res = r.cwiseAbs().maxCoeff();
        const double scaled = rhs_norm > 0 ? res / rhs_norm : res;
        if (scaled_residual) *scaled_residual = scaled;
        if (!x.allFinite()) throw conditioning_error("saddle solve produced non-finite values (condition estimate " + std::to_string(condition_estimate()) + ")");
        return x;
    }

private:
    const SaddleSystem* sys_;
    Eigen::MatrixXd matrix_;
    SymmetricIndefiniteSolver lu_;
};

struct Interpolant {
    KernelSpec spec;
    PointSet centers;
    PolynomialBasis basis;
    Eigen::VectorXd a;  // kernel weights
    Eigen::VectorXd b;  // polynomial weights
    double residual = 0;
    double condition_estimate = 0;
};

inline constexpr double solve_residual_tolerance = 1e-8;

inline Interpolant solve_interpolant(const SaddleSolver& solver, std::span<const double> values)
{
    const SaddleSystem& sys = solver.system();
    const Eigen::Index n = sys.n(), N = sys.poly_size();
    if (static_cast<Eigen::Index>(values.size()) != n) throw domain_error("data length does not match the center count");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + N);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = values[static_cast<std::size_t>(i)];
    double residual = 0;
    Eigen::VectorXd sol = solver.solve(rhs, &residual);
    if (residual > solve_residual_tolerance)
        throw conditioning_error("interpolation residual " + std::to_string(residual) + " exceeds tolerance; condition estimate " +
                                 std::to_string(solver.condition_estimate()));
    Interpolant s;
    s.spec = sys.spec;
    s.centers = sys.centers;
    s.basis = sys.basis;
    s.a = sol.head(n);
    s.b = sol.tail(N);
    s.residual = residual;
    s.condition_estimate = solver.condition_estimate();
    return s;
}

inline Interpolant solve_interpolant(const SaddleSystem& sys, std::span<const double> values)
{
    SaddleSolver solver(sys);
    return solve_interpolant(solver, values);
}

// Sum_i a_i phi(|x - xi_i|) + sum_j b_j p_j(x) at every point of a flat (row-major) array.
inline std::vector<double> evaluate_kernel_expansion(const KernelSpec& spec, const PointSet& centers, std::span<const double> a,
                                                     const PolynomialBasis* basis, std::span<const double> b,
                                                     std::span<const double> points)
{
    const RadialKernel phi(spec);
    const auto d = static_cast<std::size_t>(centers.dim());
    if (points.size() % d != 0) throw domain_error("evaluation points have the wrong dimension");
    if (a.size() != centers.size()) throw domain_error("coefficient count does not match the center count");
    if (b.size() != (basis ? basis->size() : 0)) throw domain_error("polynomial coefficient count does not match the basis");
    const std::size_t m = points.size() / d;
    const double support = kernel_properties(spec).support_radius;
    std::vector<double> out(m);
    std::vector<double> pvals(basis ? basis->size() : 0);
    const bool compact = std::isfinite(support);
    std::optional<BucketGrid> grid;
    if (compact && centers.size() > 64) grid.emplace(centers);
    for (std::size_t j = 0; j < m; ++j) {
        const std::span<const double> x(points.data() + j * d, d);
        CompensatedSum s;
        if (grid) {
            grid->for_each_within(x, support, [&](std::size_t i, double r2) {
                if (a[i] != 0) s.add(a[i] * phi(std::sqrt(r2)));
            });
        } else {
            for (std::size_t i = 0; i < centers.size(); ++i)
                if (a[i] != 0) s.add(a[i] * phi(distance(x, centers.point(i))));
        }
        if (basis && basis->size() > 0) {
            basis->evaluate(x, pvals);
            for (std::size_t k = 0; k < pvals.size(); ++k) s.add(b[k] * pvals[k]);
        }
        out[j] = s.value();
    }
    return out;
}

inline std::vector<double> evaluate_interpolant(const Interpolant& s, std::span<const double> points)
{
    return evaluate_kernel_expansion(s.spec, s.centers, {s.a.data(), static_cast<std::size_t>(s.a.size())}, &s.basis,
                                     {s.b.data(), static_cast<std::size_t>(s.b.size())}, points);
}

inline constexpr double quadratic_form_clamp = 1e-10;

// a^T Phi a with compensated accumulation.
inline double kernel_quadratic_form(const KernelSpec& spec, const PointSet& centers, std::span<const double> a)
{
    const RadialKernel phi(spec);
    CompensatedSum s;
    const double phi0 = phi(0.0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (a[i] == 0) continue;
        s.add(a[i] * a[i] * phi0);
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (a[j] != 0) s.add(2 * a[i] * a[j] * phi(distance(centers.point(i), centers.point(j))));
    }
    return s.value();
}

// |s|_N = sqrt(a^T Phi a) for s in V_Xi(phi).
inline double native_seminorm_discrete(const Interpolant& s)
{
    const double form = kernel_quadratic_form(s.spec, s.centers, {s.a.data(), static_cast<std::size_t>(s.a.size())});
    if (form < -quadratic_form_clamp) throw numerical_error("a^T Phi a = " + std::to_string(form) + " is negative beyond round-off");
    return std::sqrt(std::max(0.0, form));
}

// P_Xi(x)^2 = phi(0) - 2 u^T k(x) + u^T Phi u, where (u, v) solves the saddle system with
// right-hand side (k(x), p(x)), k(x) = (phi(x - xi))_xi.
class PowerFunction {
public:
    explicit PowerFunction(const SaddleSystem& sys) : sys_(sys), solver_(sys_), phi_(sys_.spec) {}

    double operator()(std::span<const double> x) const
    {
        const Eigen::Index n = sys_.n(), N = sys_.poly_size();
        Eigen::VectorXd rhs(n + N);
        for (Eigen::Index i = 0; i < n; ++i) rhs(i) = phi_(distance(x, sys_.centers.point(static_cast<std::size_t>(i))));
        if (N > 0) {
            const auto p = sys_.basis.evaluate(x);
            for (Eigen::Index j = 0; j < N; ++j) rhs(n + j) = p[static_cast<std::size_t>(j)];
        }
        const Eigen::VectorXd sol = solver_.solve(rhs);
        const Eigen::VectorXd u = sol.head(n);
        const Eigen::VectorXd phi_u = sys_.phi * u;
        CompensatedSum s;
        s.add(phi_(0.0));
        double scale = std::abs(phi_(0.0));
        for (Eigen::Index i = 0; i < n; ++i) {
            s.add(-2 * u(i) * rhs(i));
            s.add(u(i) * phi_u(i));
            scale += std::abs(u(i) * rhs(i)) + std::abs(u(i) * phi_u(i));
        }
        const double p2 = s.value();
        if (p2 < -1e-8 * scale - quadratic_form_clamp)
            throw numerical_error("power function square " + std::to_string(p2) + " is negative beyond round-off");
        return std::sqrt(std::max(0.0, p2));
    }

    double condition_estimate() const noexcept { return solver_.condition_estimate(); }

private:
    SaddleSystem sys_;
    SaddleSolver solver_;
    RadialKernel phi_;
};

inline double power_function(const KernelSpec& spec, const PointSet& ps, std::span<const double> x)
{
    const SaddleSystem sys = assemble_system(spec, ps);
    return PowerFunction(sys)(x);
}

// min a^T Phi a over ||a||_2 = 1, P^T a = 0.
inline double constrained_min_eigenvalue(const SaddleSystem& sys)
{
    const Eigen::Index n = sys.n(), N = sys.poly_size();
    if (n <= N) throw domain_error("no constrained directions: n <= dim of the polynomial space");
    Eigen::MatrixXd reduced;
    if (N == 0) {
        reduced = sys.phi;
    } else {
        const Eigen::MatrixXd z = null_space_of_transpose(sys.poly);
        reduced = z.transpose() * sys.phi * z;
        reduced = 0.5 * (reduced + reduced.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw conditioning_error("eigenvalue iteration did not converge");
    return eig.eigenvalues()(0);
}

inline nlohmann::json to_json(const Interpolant& s)
{
    nlohmann::json j;
    j["kernel"] = to_string(s.spec);
    j["dim"] = s.centers.dim();
    j["domain"] = {{"lower", s.centers.domain().lower}, {"upper", s.centers.domain().upper}};
    j["centers"] = s.centers.coords();
    j["a"] = std::vector<double>(s.a.data(), s.a.data() + s.a.size());
    j["b"] = std::vector<double>(s.b.data(), s.b.data() + s.b.size());
    j["polynomial"] = {{"degree", s.basis.degree()}, {"center", s.basis.center()}, {"scale", s.basis.scale()}};
    j["residual"] = s.residual;
    j["condition_estimate"] = s.condition_estimate;
    return j;
}

inline Interpolant interpolant_from_json(const nlohmann::json& j)
{
    try {
        Interpolant s;
        s.spec = parse_kernel_spec(j.at("kernel").get<std::string>());
        Box box(j.at("domain").at("lower").get<std::vector<double>>(), j.at("domain").at("upper").get<std::vector<double>>());
        s.centers = PointSet(box, j.at("centers").get<std::vector<double>>());
        const auto a = j.at("a").get<std::vector<double>>();
        const auto b = j.at("b").get<std::vector<double>>();
        s.a = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
        s.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
        const auto& p = j.at("polynomial");
        s.basis = PolynomialBasis(box.dim(), p.at("degree").get<int>(), p.at("center").get<std::vector<double>>(), p.at("scale").get<double>());
        s.residual = j.at("residual").get<double>();
        s.condition_estimate = j.at("condition_estimate").get<double>();
        if (static_cast<std::size_t>(s.a.size()) != s.centers.size() || static_cast<std::size_t>(s.b.size()) != s.basis.size())
            throw io_error("interpolant document has inconsistent coefficient lengths");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("malformed interpolant document: ") + e.what());
    }
}

}  // namespace kinterp
