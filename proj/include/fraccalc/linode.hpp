#pragma once

// Closed-form solutions of the scalar linear problems
//   Caputo:  dC u = lambda u + f,   u(0) = u0
//   RL:      dRL v = lambda v + f,  I_{1-alpha} v(0+) = v0
// through Mittag-Leffler functions and the variation-of-constants convolution with P_alpha.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fraccalc/detail/compensated.hpp"
#include "fraccalc/kernel_weights.hpp"
#include "fraccalc/path.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

struct LinearProblem {
    DerivativeKind kind = DerivativeKind::Caputo;
    FracOrder alpha{1.0};
    double lambda = 0.0;
    double datum = 0.0;                     ///< u(0) for Caputo, I_{1-alpha} v(0+) for RL (v(0) when alpha = 1)
    std::function<double(double)> forcing;  ///< empty for the homogeneous problem

    void validate() const {
        alpha.require_at_most_one("linear problem");
        if (!std::isfinite(lambda) || !std::isfinite(datum)) throw DomainError("linear problem: non-finite coefficient");
    }
};

/// u0 E_alpha(lambda t^alpha) at a single time.
inline double caputo_linear_value(FracOrder alpha, double lambda, double u0, double t) {
    if (t == 0.0) return u0;
    const double a = alpha.value();
    return u0 * mittag_leffler(MLParams(a, 1.0), lambda * std::pow(t, a));
}

/// v0 P_alpha(t; -lambda) at a single time t > 0.
inline double rl_linear_value(FracOrder alpha, double lambda, double v0, double t) {
    return v0 * p_alpha(t, alpha, complex(lambda, 0.0)).real();
}

namespace detail {

inline void require_kind(const LinearProblem& p, DerivativeKind kind, bool forced, const char* where) {
    p.validate();
    if (p.kind != kind) throw DomainError(std::string(where) + ": wrong derivative kind");
    if (static_cast<bool>(p.forcing) != forced) {
        throw DomainError(std::string(where) + (forced ? ": forcing term required" : ": forcing term not allowed"));
    }
}

inline PathMeta linear_meta(const LinearProblem& p, const char* method) {
    PathMeta m;
    m.method = method;
    m.alpha = p.alpha.value();
    m.kind = p.kind;
    return m;
}

// Q_n ~= int_0^{t_n} P_alpha(t_n - s; -lambda) f(s) ds.
// On each cell [t_k, t_{k+1}] the factor (t_n - s)^(alpha-1) is integrated exactly, f is taken at
// the left node, and E_{alpha,alpha} is evaluated at the cell-midpoint distance.
inline std::vector<double> variation_of_constants(const LinearProblem& p, const UniformGrid& grid) {
    const double a = p.alpha.value();
    const KernelWeights w(p.alpha, grid);
    const std::size_t n_steps = grid.n_steps();

    std::vector<double> f(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) f[k] = p.forcing(grid.node(k));

    // ml_factor[j] = Gamma(alpha) E_{alpha,alpha}(lambda ((j - 1/2) tau)^alpha), lag j >= 1
    std::vector<double> ml_factor(n_steps + 1, 1.0);
    if (p.lambda != 0.0) {
        const MLParams mp(a, a);
        const double g = gamma(a);
        for (std::size_t j = 1; j <= n_steps; ++j) {
            const double d = (static_cast<double>(j) - 0.5) * grid.tau();
            ml_factor[j] = g * mittag_leffler(mp, p.lambda * std::pow(d, a));
        }
    }

    std::vector<double> q(grid.size(), 0.0);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        CompensatedSum<double> acc;
        for (std::size_t k = 0; k < n; ++k) acc.add(f[k] * ml_factor[n - k] * w(n, k));
        q[n] = acc.value();
    }
    return q;
}

}  // namespace detail

inline SolutionPath solve_caputo_homogeneous(const LinearProblem& p, const UniformGrid& grid) {
    detail::require_kind(p, DerivativeKind::Caputo, false, "solve_caputo_homogeneous");
    SolutionPath path(grid, 1, detail::linear_meta(p, "analytic"));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        path.set(n, 0, caputo_linear_value(p.alpha, p.lambda, p.datum, grid.node(n)));
    }
    return path;
}

inline SolutionPath solve_rl_homogeneous(const LinearProblem& p, const UniformGrid& grid) {
    detail::require_kind(p, DerivativeKind::RiemannLiouville, false, "solve_rl_homogeneous");
    SolutionPath path(grid, 1, detail::linear_meta(p, "analytic"));
    for (std::size_t n = 1; n < grid.size(); ++n) {
        path.set(n, 0, rl_linear_value(p.alpha, p.lambda, p.datum, grid.node(n)));
    }
    if (p.alpha.is_one()) {
        path.set(0, 0, p.datum);
    } else {
        path.mark_singular_origin();
    }
    return path;
}

inline SolutionPath solve_caputo_forced(const LinearProblem& p, const UniformGrid& grid) {
    detail::require_kind(p, DerivativeKind::Caputo, true, "solve_caputo_forced");
    const std::vector<double> q = detail::variation_of_constants(p, grid);
    SolutionPath path(grid, 1, detail::linear_meta(p, "analytic"));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        path.set(n, 0, caputo_linear_value(p.alpha, p.lambda, p.datum, grid.node(n)) + q[n]);
    }
    return path;
}

inline SolutionPath solve_rl_forced(const LinearProblem& p, const UniformGrid& grid) {
    detail::require_kind(p, DerivativeKind::RiemannLiouville, true, "solve_rl_forced");
    const std::vector<double> q = detail::variation_of_constants(p, grid);
    SolutionPath path(grid, 1, detail::linear_meta(p, "analytic"));
    for (std::size_t n = 1; n < grid.size(); ++n) {
        path.set(n, 0, rl_linear_value(p.alpha, p.lambda, p.datum, grid.node(n)) + q[n]);
    }
    if (p.alpha.is_one()) {
        path.set(0, 0, p.datum);
    } else {
        path.mark_singular_origin();
    }
    return path;
}

/// Dispatches on kind and on the presence of a forcing term.
inline SolutionPath solve_linear(const LinearProblem& p, const UniformGrid& grid) {
    const bool forced = static_cast<bool>(p.forcing);
    if (p.kind == DerivativeKind::Caputo) {
        return forced ? solve_caputo_forced(p, grid) : solve_caputo_homogeneous(p, grid);
    }
    return forced ? solve_rl_forced(p, grid) : solve_rl_homogeneous(p, grid);
}

}  // namespace fraccalc
