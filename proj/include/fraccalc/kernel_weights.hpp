#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

namespace detail {

// j^a - (j-1)^a for j >= 1, without the cancellation of the direct difference.
inline double power_increment(double a, std::size_t j) {
    if (j == 1 || a == 1.0) return 1.0;
    const double x = static_cast<double>(j);
    return -std::pow(x, a) * std::expm1(a * std::log1p(-1.0 / x));
}

// (l+1)^p - 2 l^p + (l-1)^p for l >= 1.
inline double power_second_difference(double p, std::size_t l) {
    const double x = static_cast<double>(l);
    if (l == 1) return std::pow(2.0, p) - 2.0;
    const double h = 1.0 / x;
    return std::pow(x, p) * (std::expm1(p * std::log1p(h)) + std::expm1(p * std::log1p(-h)));
}

}  // namespace detail

/// Integrated power-kernel weights
///
///   w[n][k] = int_{t_k}^{t_{k+1}} K_alpha(t_n - s) ds = tau^alpha ((n-k)^alpha - (n-1-k)^alpha) / Gamma(alpha+1),
///
/// for 0 <= k < n. The table is Toeplitz (it depends on n - k only), so only one value per
/// lag is stored.
class KernelWeights {
public:
    KernelWeights(FracOrder alpha, UniformGrid grid) : alpha_(alpha), grid_(grid) {
        const double a = alpha.value();
        scale_ = std::pow(grid.tau(), a) * reciprocal_gamma(a + 1.0);
        if (alpha.is_one()) scale_ = grid.tau();
        lag_.resize(grid.n_steps() + 1);
        lag_[0] = 0.0;
        for (std::size_t j = 1; j < lag_.size(); ++j) lag_[j] = scale_ * detail::power_increment(a, j);
    }

    [[nodiscard]] FracOrder alpha() const noexcept { return alpha_; }
    [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }

    /// w[n][k], 0 <= k < n <= n_steps.
    [[nodiscard]] double operator()(std::size_t n, std::size_t k) const { return lag_[n - k]; }

    /// Weight as a function of the lag j = n - k >= 1.
    [[nodiscard]] double lag(std::size_t j) const { return lag_[j]; }

    /// Closed form of sum_k w[n][k] = t_n^alpha / Gamma(alpha + 1).
    [[nodiscard]] double row_sum_closed_form(std::size_t n) const {
        return scale_ * std::pow(static_cast<double>(n), alpha_.value());
    }

private:
    FracOrder alpha_;
    UniformGrid grid_;
    double scale_;
    std::vector<double> lag_;
};

inline KernelWeights kernel_weights(FracOrder alpha, const UniformGrid& grid) { return KernelWeights(alpha, grid); }

/// Product-trapezoid weights: exact moments of the piecewise-linear (hat-function) interpolant
/// against K_alpha,
///
///   int_0^{t_n} F(s) K_alpha(t_n - s) ds  ~=  sum_{k=0}^{n} a[n][k] F(t_k).
///
/// These are the corrector weights of the fractional Adams-Bashforth-Moulton method.
class TrapezoidWeights {
public:
    TrapezoidWeights(FracOrder alpha, UniformGrid grid) : alpha_(alpha), grid_(grid) {
        const double a = alpha.value();
        const double p = a + 1.0;
        scale_ = alpha.is_one() ? 0.5 * grid.tau() : std::pow(grid.tau(), a) * reciprocal_gamma(a + 2.0);
        interior_.resize(grid.n_steps() + 1);
        first_.resize(grid.n_steps() + 1);
        interior_[0] = 0.0;
        first_[0] = 0.0;
        for (std::size_t l = 1; l < interior_.size(); ++l) {
            interior_[l] = alpha.is_one() ? grid.tau() : scale_ * detail::power_second_difference(p, l);
        }
        for (std::size_t n = 1; n < first_.size(); ++n) {
            if (alpha.is_one()) {
                first_[n] = scale_;
                continue;
            }
            // (n-1)^p - (n-1-a) n^a = n^p [ (1-x)^p - (1 - p x) ],  x = 1/n
            const double nd = static_cast<double>(n);
            const double x = 1.0 / nd;
            const double bracket = (n == 1) ? a : std::expm1(p * std::log1p(-x)) + p * x;
            first_[n] = scale_ * ((n == 1) ? a : std::pow(nd, p) * bracket);
        }
    }

    [[nodiscard]] FracOrder alpha() const noexcept { return alpha_; }

    /// a[n][k] for 0 <= k <= n, n >= 1.
    [[nodiscard]] double operator()(std::size_t n, std::size_t k) const {
        if (k == n) return scale_;
        if (k == 0) return first_[n];
        return interior_[n - k];
    }

private:
    FracOrder alpha_;
    UniformGrid grid_;
    double scale_;
    std::vector<double> interior_;  // by lag l = n - k, 1 <= k <= n-1
    std::vector<double> first_;     // k = 0, by row n
};

}  // namespace fraccalc
