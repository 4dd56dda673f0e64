#pragma once

#include <span>
#include <vector>

#include "kinterp/error.hpp"

namespace kinterp {

// Multi-indices of total degree <= degree in d variables, graded then lexicographic.
inline std::vector<std::vector<int>> multi_indices(int d, int degree)
{
    std::vector<std::vector<int>> out;
    if (degree < 0) return out;
    for (int total = 0; total <= degree; ++total) {
        std::vector<int> alpha(static_cast<std::size_t>(d), 0);
        // enumerate compositions of `total` into d parts, first entry largest first
        auto rec = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == d - 1) {
                alpha[static_cast<std::size_t>(pos)] = remaining;
                out.push_back(alpha);
                return;
            }
            for (int v = remaining; v >= 0; --v) {
                alpha[static_cast<std::size_t>(pos)] = v;
                self(self, pos + 1, remaining - v);
            }
        };
        rec(rec, 0, total);
    }
    return out;
}

// Shifted and scaled monomials ((x - c) / sigma)^alpha, |alpha| <= degree.
// A negative degree gives the empty basis (CPD order 0).
class PolynomialBasis {
public:
    PolynomialBasis() = default;
    PolynomialBasis(int d, int degree, std::vector<double> center, double scale)
        : d_(d), degree_(degree), center_(std::move(center)), scale_(scale), alphas_(multi_indices(d, degree))
    {
        if (d < 1) throw parameter_error("polynomial basis needs d >= 1");
        if (static_cast<int>(center_.size()) != d) throw parameter_error("polynomial basis center has wrong dimension");
        if (!(scale_ > 0)) throw parameter_error("polynomial basis scale must be positive");
    }

    int dim() const noexcept { return d_; }
    int degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return alphas_.size(); }
    const std::vector<std::vector<int>>& exponents() const noexcept { return alphas_; }
    const std::vector<double>& center() const noexcept { return center_; }
    double scale() const noexcept { return scale_; }

    // Writes p_j(x) for every basis element into out (size() entries).
    void evaluate(std::span<const double> x, std::span<double> out) const
    {
        if (alphas_.empty()) return;
        // powers[k][e] = t_k^e
        thread_local std::vector<double> powers;
        const auto stride = static_cast<std::size_t>(degree_ + 1);
        powers.assign(static_cast<std::size_t>(d_) * stride, 1.0);
        for (int k = 0; k < d_; ++k) {
            const double t = (x[static_cast<std::size_t>(k)] - center_[static_cast<std::size_t>(k)]) / scale_;
            for (int e = 1; e <= degree_; ++e)
                powers[static_cast<std::size_t>(k) * stride + static_cast<std::size_t>(e)] =
                    powers[static_cast<std::size_t>(k) * stride + static_cast<std::size_t>(e - 1)] * t;
        }
        for (std::size_t j = 0; j < alphas_.size(); ++j) {
            double v = 1;
            for (int k = 0; k < d_; ++k)
                v *= powers[static_cast<std::size_t>(k) * stride + static_cast<std::size_t>(alphas_[j][static_cast<std::size_t>(k)])];
            out[j] = v;
        }
    }

    std::vector<double> evaluate(std::span<const double> x) const
    {
        std::vector<double> out(size());
        evaluate(x, out);
        return out;
    }

private:
    int d_ = 1;
    int degree_ = -1;
    std::vector<double> center_{0.0};
    double scale_ = 1;
    std::vector<std::vector<int>> alphas_;
};

}  // namespace kinterp
