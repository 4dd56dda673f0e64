#pragma once

// Dense helpers: Bunch–Kaufman factorization through LAPACK, compensated sums.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "kinterp/error.hpp"

namespace kinterp {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

inline double compensated_dot(std::span<const double> a, std::span<const double> b)
{
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

// Symmetric indefinite factorization A = P L D L^T P^T with Bunch–Kaufman pivoting.
class SymmetricIndefiniteSolver {
public:
    SymmetricIndefiniteSolver() = default;

    explicit SymmetricIndefiniteSolver(const Eigen::MatrixXd& a) { factor(a); }

    void factor(const Eigen::MatrixXd& a)
    {
        if (a.rows() != a.cols()) throw domain_error("symmetric solver needs a square matrix");
        n_ = static_cast<lapack_int>(a.rows());
        lu_ = a;  // column-major; the lower triangle is used
        ipiv_.assign(static_cast<std::size_t>(n_), 0);
        anorm_ = 0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) anorm_ = std::max(anorm_, a.col(j).cwiseAbs().sum());
        if (n_ == 0) return;
        const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n_, lu_.data(), n_, ipiv_.data());
        if (info < 0) throw conditioning_error("dsytrf: illegal argument " + std::to_string(-info));
        if (info > 0) throw conditioning_error("symmetric indefinite factorization is exactly singular (D(" + std::to_string(info) + ") = 0)");
        double rcond = 0;
        const lapack_int cinfo = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', n_, lu_.data(), n_, ipiv_.data(), anorm_, &rcond);
        if (cinfo != 0) throw conditioning_error("dsycon failed");
        rcond_ = rcond;
    }

    Eigen::Index size() const noexcept { return n_; }

    // Reciprocal 1-norm condition estimate.
    double rcond() const noexcept { return rcond_; }
    double condition_estimate() const noexcept { return rcond_ > 0 ? 1.0 / rcond_ : INFINITY; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const
    {
        Eigen::VectorXd x = b;
        solve_in_place(x);
        return x;
    }

    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const
    {
        Eigen::MatrixXd x = b;
        if (n_ == 0) return x;
        const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n_, static_cast<lapack_int>(x.cols()), lu_.data(), n_,
                                               ipiv_.data(), x.data(), n_);
        if (info != 0) throw conditioning_error("dsytrs failed");
        return x;
    }

    void solve_in_place(Eigen::VectorXd& x) const
    {
        if (n_ == 0) return;
        const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n_, 1, lu_.data(), n_, ipiv_.data(), x.data(), n_);
        if (info != 0) throw conditioning_error("dsytrs failed");
    }

private:
    lapack_int n_ = 0;
    Eigen::MatrixXd lu_;
    std::vector<lapack_int> ipiv_;
    double anorm_ = 0;
    double rcond_ = 0;
};

// Orthonormal basis of the null space of B^T (B is n x N with full column rank), via a full QR of B.
inline Eigen::MatrixXd null_space_of_transpose(const Eigen::MatrixXd& b)
{
    const Eigen::Index n = b.rows();
    const Eigen::Index cols = b.cols();
    if (cols == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.rightCols(n - cols);
}

}  // namespace kinterp
