#pragma once

// Tensor cosine bumps g(x) = prod_i cos^p(pi (x_i - c_i) / (2 w_i)) on the box |x_i - c_i| <= w_i.
// cos^p is expanded into a finite cosine series, so every derivative is exact.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "kinterp/error.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/kernels.hpp"

namespace kinterp {

class CosineBump {
public:
    CosineBump() = default;
    CosineBump(std::vector<double> center, std::vector<double> half_width, int power)
        : center_(std::move(center)), half_width_(std::move(half_width)), power_(power)
    {
        if (center_.empty() || center_.size() != half_width_.size())
            throw parameter_error("bump center and half-width need the same positive dimension");
        for (double w : half_width_)
            if (!(w > 0)) throw parameter_error("bump half-width must be positive");
        if (power_ < 2 || power_ % 2 != 0) throw parameter_error("bump power must be an even integer >= 2");
        // cos^p(theta) = 2^{-p} [ C(p, p/2) + 2 sum_{k=1}^{p/2} C(p, p/2 - k) cos(2 k theta) ]
        const int half = power_ / 2;
        coefs_.resize(static_cast<std::size_t>(half + 1));
        const double scale = std::ldexp(1.0, -power_);
        coefs_[0] = scale * detail::binomial(power_, half);
        for (int k = 1; k <= half; ++k) coefs_[static_cast<std::size_t>(k)] = 2 * scale * detail::binomial(power_, half - k);
    }

    int dim() const noexcept { return static_cast<int>(center_.size()); }
    int power() const noexcept { return power_; }
    const std::vector<double>& center() const noexcept { return center_; }
    const std::vector<double>& half_width() const noexcept { return half_width_; }
    const std::vector<double>& series() const noexcept { return coefs_; }

    Box support() const
    {
        std::vector<double> lo(center_.size()), hi(center_.size());
        for (std::size_t i = 0; i < center_.size(); ++i) {
            lo[i] = center_[i] - half_width_[i];
            hi[i] = center_[i] + half_width_[i];
        }
        return Box(std::move(lo), std::move(hi));
    }

    // j-th derivative of the 1-d factor on axis i at t.
    double axis_derivative(int axis, double t, int j) const
    {
        const auto a = static_cast<std::size_t>(axis);
        const double u = t - center_[a];
        const double w = half_width_[a];
        if (std::abs(u) > w) return 0.0;
        double s = 0;
        for (std::size_t k = 0; k < coefs_.size(); ++k) {
            const double omega = static_cast<double>(k) * std::numbers::pi / w;
            if (k == 0 && j > 0) continue;
            const double phase = omega * u + j * std::numbers::pi / 2;  // d^j/du^j cos(omega u) = omega^j cos(omega u + j pi / 2)
            s += coefs_[k] * std::pow(omega, j) * std::cos(phase);
        }
        return s;
    }

    double value(std::span<const double> x) const
    {
        double v = 1;
        for (int i = 0; i < dim(); ++i) {
            v *= axis_derivative(i, x[static_cast<std::size_t>(i)], 0);
            if (v == 0) return 0;
        }
        return v;
    }

    // D^alpha g(x).
    double derivative(std::span<const double> x, std::span<const int> alpha) const
    {
        double v = 1;
        for (int i = 0; i < dim(); ++i) {
            v *= axis_derivative(i, x[static_cast<std::size_t>(i)], alpha[static_cast<std::size_t>(i)]);
            if (v == 0) return 0;
        }
        return v;
    }

private:
    std::vector<double> center_{0.5};
    std::vector<double> half_width_{0.25};
    int power_ = 2;
    std::vector<double> coefs_{0.5, 0.5};
};

}  // namespace kinterp
