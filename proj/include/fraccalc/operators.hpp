#pragma once

// Fractional integral and derivatives with lower limit 0: closed form on monomials and
// grid-based approximations on sampled functions.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fraccalc/detail/compensated.hpp"
#include "fraccalc/kernel_weights.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

/// coefficient * t^exponent
struct Monomial {
    double coefficient = 0.0;
    double exponent = 0.0;

    [[nodiscard]] bool is_zero() const noexcept { return coefficient == 0.0; }
    [[nodiscard]] double operator()(double t) const { return is_zero() ? 0.0 : coefficient * std::pow(t, exponent); }
};

/// I_alpha t^b = Gamma(b+1) / Gamma(alpha+b+1) t^(b+alpha), b > -1.
inline Monomial frac_integral_monomial(FracOrder alpha, const Monomial& m) {
    if (!(m.exponent > -1.0)) throw DomainError("fractional integral of t^b needs b > -1");
    const double a = alpha.value();
    return {m.coefficient * gamma(m.exponent + 1.0) * reciprocal_gamma(a + m.exponent + 1.0), m.exponent + a};
}

/// Riemann-Liouville derivative of t^b, b > -1. The result is zero when b - alpha + 1 sits on a
/// pole of Gamma (this covers dRL t^(alpha-1) = 0).
inline Monomial rl_derivative_monomial(FracOrder alpha, const Monomial& m) {
    if (!(m.exponent > -1.0)) throw DomainError("Riemann-Liouville derivative of t^b needs b > -1");
    const double a = alpha.value();
    const double rg = reciprocal_gamma(m.exponent - a + 1.0);
    if (rg == 0.0) return {0.0, m.exponent - a};
    return {m.coefficient * gamma(m.exponent + 1.0) * rg, m.exponent - a};
}

/// Caputo derivative of t^b, b >= 0. Constants are annihilated; for b > 0 it coincides with the
/// Riemann-Liouville derivative.
inline Monomial caputo_derivative_monomial(FracOrder alpha, const Monomial& m) {
    if (!(m.exponent >= 0.0)) throw DomainError("Caputo derivative of t^b needs b >= 0");
    if (m.exponent == 0.0) return {0.0, -alpha.value()};
    return rl_derivative_monomial(alpha, m);
}

enum class Quadrature {
    LeftEndpoint,      ///< f piecewise constant from the left node; exact on constants
    ProductTrapezoid,  ///< f piecewise linear; exact on affine functions
};

/// (I_alpha f)(t_n) by product quadrature with exactly integrated kernel moments. Node 0 is 0.
inline SampledFunction frac_integral_num(const SampledFunction& f, FracOrder alpha,
                                         Quadrature rule = Quadrature::LeftEndpoint) {
    f.require_finite_origin("frac_integral_num");
    const UniformGrid& grid = f.grid();
    std::vector<double> out(grid.size(), 0.0);
    if (rule == Quadrature::LeftEndpoint) {
        const KernelWeights w(alpha, grid);
        for (std::size_t n = 1; n < out.size(); ++n) {
            detail::CompensatedSum<double> acc;
            for (std::size_t k = 0; k < n; ++k) acc.add(f[k] * w(n, k));
            out[n] = acc.value();
        }
    } else {
        const TrapezoidWeights a(alpha, grid);
        for (std::size_t n = 1; n < out.size(); ++n) {
            detail::CompensatedSum<double> acc;
            for (std::size_t k = 0; k <= n; ++k) acc.add(f[k] * a(n, k));
            out[n] = acc.value();
        }
    }
    return SampledFunction(grid, std::move(out));
}

/// L1 scheme for the Caputo derivative, alpha in (0, 1): f is interpolated linearly between
/// nodes and its piecewise-constant slope is integrated exactly against K_{1-alpha}.
/// Node 0 is left undefined (NaN) and flagged.
inline SampledFunction caputo_derivative_num(const SampledFunction& f, FracOrder alpha) {
    alpha.require_below_one("caputo_derivative_num");
    f.require_finite_origin("caputo_derivative_num");
    const UniformGrid& grid = f.grid();
    const KernelWeights w(FracOrder(1.0 - alpha.value()), grid);
    const double inv_tau = 1.0 / grid.tau();
    std::vector<double> slope(grid.n_steps());
    for (std::size_t k = 0; k < slope.size(); ++k) slope[k] = (f[k + 1] - f[k]) * inv_tau;

    std::vector<double> out(grid.size());
    out[0] = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 1; n < out.size(); ++n) {
        detail::CompensatedSum<double> acc;
        for (std::size_t k = 0; k < n; ++k) acc.add(slope[k] * w(n, k));
        out[n] = acc.value();
    }
    return SampledFunction(grid, std::move(out), true);
}

/// Riemann-Liouville derivative, alpha in (0, 1), through
/// dRL f = dC f + f(0) t^-alpha / Gamma(1 - alpha).
inline SampledFunction rl_derivative_num(const SampledFunction& f, FracOrder alpha) {
    alpha.require_below_one("rl_derivative_num");
    SampledFunction caputo = caputo_derivative_num(f, alpha);
    std::vector<double> out = caputo.values();
    const double a = alpha.value();
    const double c = f[0] * reciprocal_gamma(1.0 - a);
    for (std::size_t n = 1; n < out.size(); ++n) out[n] += c * std::pow(f.grid().node(n), -a);
    return SampledFunction(f.grid(), std::move(out), true);
}

namespace detail {

/// g_k = (-1)^k binom(alpha, k) via g_0 = 1, g_k = g_{k-1} (k - 1 - alpha) / k.
inline std::vector<double> grunwald_weights(double alpha, std::size_t count) {
    std::vector<double> g(count + 1);
    g[0] = 1.0;
    for (std::size_t k = 1; k <= count; ++k) {
        g[k] = g[k - 1] * (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
    }
    return g;
}

}  // namespace detail

/// Grunwald-Letnikov difference quotient h^-alpha sum_{k=0}^{j} (-1)^k binom(alpha,k) f(t - k h),
/// h = t / j.
template <typename F>
double gl_derivative(F&& f, double t, FracOrder alpha, std::size_t j) {
    if (!(t > 0.0)) throw DomainError("gl_derivative: t must be > 0");
    if (j < 1) throw DomainError("gl_derivative: need at least one step");
    const double h = t / static_cast<double>(j);
    const std::vector<double> g = detail::grunwald_weights(alpha.value(), j);
    detail::CompensatedSum<double> acc;
    for (std::size_t k = 0; k <= j; ++k) {
        if (g[k] == 0.0) continue;
        acc.add(g[k] * f(t - static_cast<double>(k) * h));
    }
    return acc.value() * std::pow(h, -alpha.value());
}

/// Grunwald-Letnikov derivative of grid samples with h = tau: node n uses f(t_n), ..., f(t_0).
/// Node 0 is undefined (NaN).
inline SampledFunction gl_derivative_num(const SampledFunction& f, FracOrder alpha) {
    f.require_finite_origin("gl_derivative_num");
    const UniformGrid& grid = f.grid();
    const std::vector<double> g = detail::grunwald_weights(alpha.value(), grid.n_steps());
    const double scale = std::pow(grid.tau(), -alpha.value());
    std::vector<double> out(grid.size());
    out[0] = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 1; n < out.size(); ++n) {
        detail::CompensatedSum<double> acc;
        for (std::size_t k = 0; k <= n; ++k) acc.add(g[k] * f[n - k]);
        out[n] = acc.value() * scale;
    }
    return SampledFunction(grid, std::move(out), true);
}

}  // namespace fraccalc
