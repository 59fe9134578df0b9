#pragma once

// Product-integration solvers for
//   Caputo:  u(t) = u(0) + int_0^t f(s, u(s)) K_alpha(t - s) ds
//   RL:      v(t) = K_alpha(t) I_{1-alpha} v(0+) + int_0^t f(s, v(s)) K_alpha(t - s) ds
// on a uniform grid. Every step sums over the whole history, so a solve costs O(N^2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fraccalc/error.hpp"
#include "fraccalc/kernel_weights.hpp"
#include "fraccalc/path.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

using State = std::vector<double>;
using Rhs = std::function<State(double, const State&)>;

/// Fractional initial-value problem in integral form. `datum` is u(0) for Caputo and
/// I_{1-alpha} v(0+) for Riemann-Liouville.
struct FracIVP {
    DerivativeKind kind = DerivativeKind::Caputo;
    FracOrder alpha{1.0};
    Rhs rhs;
    State datum;
    double horizon = 1.0;

    static FracIVP scalar(DerivativeKind kind, FracOrder alpha, std::function<double(double, double)> f, double datum,
                          double horizon) {
        return {kind, alpha,
                [f = std::move(f)](double t, const State& u) { return State{f(t, u[0])}; },
                State{datum}, horizon};
    }

    [[nodiscard]] std::size_t dim() const noexcept { return datum.size(); }

    void validate(const UniformGrid& grid, const char* where) const {
        alpha.require_at_most_one(where);
        if (datum.empty()) throw DomainError(std::string(where) + ": empty initial datum");
        if (!rhs) throw DomainError(std::string(where) + ": missing right-hand side");
        for (double x : datum) {
            if (!std::isfinite(x)) throw DomainError(std::string(where) + ": non-finite initial datum");
        }
        if (std::abs(grid.horizon() - horizon) > 1e-9 * std::max(1.0, horizon)) {
            throw DomainError(std::string(where) + ": grid does not end at the problem horizon");
        }
    }
};

struct SolverOptions {
    int corrector_iterations = 1;     ///< PECE by default
    double residual_tolerance = 1e-12;
    int max_iterations = 50;
    double divergence_bound = 1e150;  ///< |U| beyond this flags overflow and stops the run
};

namespace detail {

inline State eval_rhs(const Rhs& rhs, double t, const State& u, std::size_t step) {
    State out;
    try {
        out = rhs(t, u);
    } catch (const std::exception& e) {
        throw RhsEvaluationError(std::string("right-hand side threw: ") + e.what(), step);
    }
    if (out.size() != u.size()) {
        throw RhsEvaluationError("right-hand side returned " + std::to_string(out.size()) + " components, expected " +
                                     std::to_string(u.size()),
                                 step);
    }
    for (double x : out) {
        if (std::isnan(x)) throw RhsEvaluationError("right-hand side returned NaN", step);
    }
    return out;
}

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool diverged(std::span<const double> v, double bound) {
    for (double x : v) {
        if (!std::isfinite(x) || std::abs(x) > bound) return true;
    }
    return false;
}

/// Solves U - c f(t, U) = H. Newton with a forward-difference Jacobian and backtracking; falls
/// back to Broyden's secant update when Newton stalls.
inline State solve_implicit_step(const Rhs& rhs, double t, double c, const State& history, State guess,
                                 const SolverOptions& opt, std::size_t step) {
    const std::size_t d = history.size();
    const double tol = opt.residual_tolerance * std::max(1.0, sup_norm(history));
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    auto residual = [&](const State& u, State& fu) {
        fu = eval_rhs(rhs, t, u, step);
        Vec r(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) r[static_cast<Eigen::Index>(i)] = u[i] - c * fu[i] - history[i];
        return r;
    };

    State u = std::move(guess);
    State fu;
    Vec r = residual(u, fu);
    bool newton_ok = true;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const double rn = r.lpNorm<Eigen::Infinity>();
        if (rn <= tol) return u;
        if (!std::isfinite(rn)) break;

        Mat jac = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < d; ++j) {
            State up = u;
            const double h = 1.4901161193847656e-08 * std::max(1.0, std::abs(u[j]));
            up[j] += h;
            const State fp = eval_rhs(rhs, t, up, step);
            for (std::size_t i = 0; i < d; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= c * (fp[i] - fu[i]) / h;
            }
        }
        const Eigen::FullPivLU<Mat> lu(jac);
        if (!lu.isInvertible()) {
            newton_ok = false;
            break;
        }
        const Vec delta = lu.solve(r);

        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 12; ++ls) {
            State trial = u;
            for (std::size_t i = 0; i < d; ++i) trial[i] -= lambda * delta[static_cast<Eigen::Index>(i)];
            State ftrial;
            const Vec rt = residual(trial, ftrial);
            if (rt.lpNorm<Eigen::Infinity>() < rn || rt.lpNorm<Eigen::Infinity>() <= tol) {
                u = std::move(trial);
                fu = std::move(ftrial);
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            newton_ok = false;
            break;
        }
    }
    if (newton_ok && r.lpNorm<Eigen::Infinity>() <= tol) return u;

    // Broyden from the best point reached so far, starting with the identity as Jacobian.
    Mat b = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (r.lpNorm<Eigen::Infinity>() <= tol) return u;
        const Eigen::FullPivLU<Mat> lu(b);
        if (!lu.isInvertible()) break;
        const Vec dx = -lu.solve(r);
        State next = u;
        for (std::size_t i = 0; i < d; ++i) next[i] += dx[static_cast<Eigen::Index>(i)];
        State fnext;
        const Vec rnext = residual(next, fnext);
        const Vec dr = rnext - r;
        const double denom = dx.squaredNorm();
        if (denom == 0.0 || !std::isfinite(rnext.lpNorm<Eigen::Infinity>())) break;
        b += ((dr - b * dx) * dx.transpose()) / denom;
        u = std::move(next);
        r = rnext;
    }
    if (r.lpNorm<Eigen::Infinity>() <= tol) return u;
    throw NonlinearSolveFailure("implicit step did not reach residual " + std::to_string(tol), step);
}

inline PathMeta solver_meta(const FracIVP& ivp, const char* method) {
    PathMeta m;
    m.method = method;
    m.alpha = ivp.alpha.value();
    m.kind = ivp.kind;
    return m;
}

inline void flag_overflow(SolutionPath& path, std::size_t step) {
    path.meta().overflow = true;
    path.meta().overflow_step = step;
    for (std::size_t n = step + 1; n < path.size(); ++n) {
        for (std::size_t i = 0; i < path.dim(); ++i) path.set(n, i, std::numeric_limits<double>::quiet_NaN());
    }
}

inline State state_at(const SolutionPath& path, std::size_t n) {
    const auto s = path.state(n);
    return State(s.begin(), s.end());
}

inline void require_caputo(const FracIVP& ivp, const char* method) {
    if (ivp.kind == DerivativeKind::RiemannLiouville) {
        throw ModelRestriction(std::string(method) +
                               " is not available for Riemann-Liouville problems: v(0+) is infinite, so at least "
                               "the first time step must use the implicit interpolant (use the implicit method)");
    }
}

}  // namespace detail

/// U_{n+1} = U_0 + sum_{k=0}^{n} f(t_k, U_k) w[n+1][k], computed from an explicit history U_0..U_n.
/// The solver uses the same accumulation order, so this reproduces its steps bit for bit.
inline State explicit_euler_next(const FracIVP& ivp, const KernelWeights& w, std::span<const State> history) {
    const std::size_t n = history.size() - 1;
    const UniformGrid& grid = w.grid();
    State next = history[0];
    for (std::size_t k = 0; k <= n; ++k) {
        const State g = detail::eval_rhs(ivp.rhs, grid.node(k), history[k], k);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += w(n + 1, k) * g[i];
    }
    return next;
}

/// Explicit fractional Euler (piecewise-constant interpolant from the left). Caputo only.
inline SolutionPath solve_explicit_euler(const FracIVP& ivp, const UniformGrid& grid, const SolverOptions& opt = {}) {
    ivp.validate(grid, "solve_explicit_euler");
    detail::require_caputo(ivp, "explicit Euler");
    const std::size_t d = ivp.dim();
    const KernelWeights w(ivp.alpha, grid);
    SolutionPath path(grid, d, detail::solver_meta(ivp, "explicit"));
    std::copy(ivp.datum.begin(), ivp.datum.end(), path.state(0).begin());

    std::vector<double> g(grid.size() * d);
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        const State gn = detail::eval_rhs(ivp.rhs, grid.node(n), detail::state_at(path, n), n);
        std::copy(gn.begin(), gn.end(), g.begin() + static_cast<std::ptrdiff_t>(n * d));
        auto next = path.state(n + 1);
        for (std::size_t i = 0; i < d; ++i) {
            double acc = ivp.datum[i];
            for (std::size_t k = 0; k <= n; ++k) acc += w(n + 1, k) * g[k * d + i];
            next[i] = acc;
        }
        if (detail::diverged(next, opt.divergence_bound)) {
            detail::flag_overflow(path, n + 1);
            return path;
        }
    }
    return path;
}

/// Implicit fractional Euler (piecewise-constant interpolant from the right). Handles both kinds;
/// for Riemann-Liouville problems node 0 is the singular sentinel (unless alpha = 1).
inline SolutionPath solve_implicit_euler(const FracIVP& ivp, const UniformGrid& grid, const SolverOptions& opt = {}) {
    ivp.validate(grid, "solve_implicit_euler");
    const std::size_t d = ivp.dim();
    const double a = ivp.alpha.value();
    const bool rl = ivp.kind == DerivativeKind::RiemannLiouville;
    const KernelWeights w(ivp.alpha, grid);
    const double c = w.lag(1);
    SolutionPath path(grid, d, detail::solver_meta(ivp, "implicit"));
    std::copy(ivp.datum.begin(), ivp.datum.end(), path.state(0).begin());

    // g[k] = f(t_k, U_k); g[0] is only defined for Caputo problems
    std::vector<double> g(grid.size() * d, 0.0);
    if (!rl) {
        const State g0 = detail::eval_rhs(ivp.rhs, 0.0, ivp.datum, 0);
        std::copy(g0.begin(), g0.end(), g.begin());
    }
    const double inv_gamma_a = reciprocal_gamma(a);

    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        State history(d);
        State guess(d);
        if (!rl) {
            // U_0 + sum_{k<n} w[n+1][k] g[k+1], written as U_n plus the change of the kernel
            // weights between rows n and n+1 (exactly zero when alpha = 1).
            for (std::size_t i = 0; i < d; ++i) {
                double acc = path.value(n, i);
                for (std::size_t k = 0; k < n; ++k) acc += (w.lag(n + 1 - k) - w.lag(n - k)) * g[(k + 1) * d + i];
                history[i] = acc;
                guess[i] = acc + c * g[n * d + i];
            }
        } else {
            const double t1 = grid.node(n + 1);
            const double k_alpha = ivp.alpha.is_one() ? 1.0 : std::pow(t1, a - 1.0) * inv_gamma_a;
            for (std::size_t i = 0; i < d; ++i) {
                double acc = k_alpha * ivp.datum[i];
                for (std::size_t k = 0; k < n; ++k) acc += w(n + 1, k) * g[(k + 1) * d + i];
                history[i] = acc;
                guess[i] = n == 0 ? acc : acc + c * g[n * d + i];
            }
        }
        const State next = detail::solve_implicit_step(ivp.rhs, grid.node(n + 1), c, history, std::move(guess), opt, n + 1);
        std::copy(next.begin(), next.end(), path.state(n + 1).begin());
        if (detail::diverged(next, opt.divergence_bound)) {
            detail::flag_overflow(path, n + 1);
            break;
        }
        const State gn = detail::eval_rhs(ivp.rhs, grid.node(n + 1), next, n + 1);
        std::copy(gn.begin(), gn.end(), g.begin() + static_cast<std::ptrdiff_t>((n + 1) * d));
    }
    if (rl && !ivp.alpha.is_one()) path.mark_singular_origin();
    return path;
}

/// Fractional Adams-Bashforth-Moulton predictor-corrector: explicit-Euler predictor, corrector
/// from the piecewise-linear interpolant F_l with exactly integrated hat-function weights.
/// Caputo only.
inline SolutionPath solve_adams_pc(const FracIVP& ivp, const UniformGrid& grid, const SolverOptions& opt = {}) {
    ivp.validate(grid, "solve_adams_pc");
    detail::require_caputo(ivp, "the Adams predictor-corrector");
    if (opt.corrector_iterations < 1) throw DomainError("solve_adams_pc: need at least one corrector iteration");
    const std::size_t d = ivp.dim();
    const KernelWeights b(ivp.alpha, grid);
    const TrapezoidWeights a(ivp.alpha, grid);
    SolutionPath path(grid, d, detail::solver_meta(ivp, "adams"));
    std::copy(ivp.datum.begin(), ivp.datum.end(), path.state(0).begin());

    std::vector<double> g(grid.size() * d);
    {
        const State g0 = detail::eval_rhs(ivp.rhs, 0.0, ivp.datum, 0);
        std::copy(g0.begin(), g0.end(), g.begin());
    }
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        const double t1 = grid.node(n + 1);
        State pred(d);
        State corr_history(d);
        for (std::size_t i = 0; i < d; ++i) {
            double p = ivp.datum[i];
            for (std::size_t k = 0; k <= n; ++k) p += b(n + 1, k) * g[k * d + i];
            pred[i] = p;
            double q = ivp.datum[i];
            for (std::size_t k = 0; k <= n; ++k) q += a(n + 1, k) * g[k * d + i];
            corr_history[i] = q;
        }
        const double a_last = a(n + 1, n + 1);
        State u = pred;
        for (int it = 0; it < opt.corrector_iterations; ++it) {
            const State fp = detail::eval_rhs(ivp.rhs, t1, u, n + 1);
            for (std::size_t i = 0; i < d; ++i) u[i] = corr_history[i] + a_last * fp[i];
        }
        std::copy(u.begin(), u.end(), path.state(n + 1).begin());
        if (detail::diverged(u, opt.divergence_bound)) {
            detail::flag_overflow(path, n + 1);
            return path;
        }
        const State gn = detail::eval_rhs(ivp.rhs, t1, u, n + 1);
        std::copy(gn.begin(), gn.end(), g.begin() + static_cast<std::ptrdiff_t>((n + 1) * d));
    }
    return path;
}

enum class Method { Explicit, Implicit, Adams };

inline SolutionPath solve(const FracIVP& ivp, const UniformGrid& grid, Method method, const SolverOptions& opt = {}) {
    switch (method) {
        case Method::Explicit: return solve_explicit_euler(ivp, grid, opt);
        case Method::Implicit: return solve_implicit_euler(ivp, grid, opt);
        case Method::Adams: return solve_adams_pc(ivp, grid, opt);
    }
    throw DomainError("unknown method");
}

}  // namespace fraccalc
