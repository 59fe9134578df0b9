#pragma once

// Abel's mechanical problem. A bead released at height y on a frictionless curve reaches the
// bottom after
//   T(y) = int_0^y s'(eta) / sqrt(2 g (y - eta)) d eta,
// i.e. dC^{1/2} s = sqrt(2g/pi) T with s(0) = 0, so s = I_{1/2}[sqrt(2g/pi) T]. The curve psi(y)
// then follows from s'(y) = sqrt(1 + psi'(y)^2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fraccalc/detail/compensated.hpp"
#include "fraccalc/error.hpp"
#include "fraccalc/operators.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

struct AbelProblem {
    std::function<double(double)> fall_time;  ///< T(y), needed on (0, y_max]
    double g = 9.81;
    double y_max = 1.0;
    std::size_t n_steps = 4096;

    [[nodiscard]] UniformGrid grid() const { return UniformGrid(y_max / static_cast<double>(n_steps), n_steps); }

    void validate() const {
        if (!fall_time) throw DomainError("AbelProblem: missing fall-time function");
        if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("AbelProblem: g must be finite and > 0");
        if (!(y_max > 0.0) || !std::isfinite(y_max)) throw DomainError("AbelProblem: y_max must be finite and > 0");
        if (n_steps < 2) throw DomainError("AbelProblem: need at least two steps");
    }
};

/// Fall time on the grid. When T is not finite at y = 0 it is extrapolated linearly from the
/// first two nodes.
inline SampledFunction sample_fall_time(const AbelProblem& p) {
    p.validate();
    const UniformGrid grid = p.grid();
    std::vector<double> t(grid.size());
    for (std::size_t k = 1; k < t.size(); ++k) {
        t[k] = p.fall_time(grid.node(k));
        if (!std::isfinite(t[k]) || t[k] < 0.0) {
            throw DomainError("fall time must be finite and >= 0, got " + std::to_string(t[k]) + " at y = " +
                              std::to_string(grid.node(k)));
        }
    }
    const double t0 = p.fall_time(0.0);
    t[0] = std::isfinite(t0) ? t0 : std::max(0.0, 2.0 * t[1] - t[2]);
    return SampledFunction(grid, std::move(t));
}

/// Arc length s(y_n) = I_{1/2}[sqrt(2g/pi) T](y_n) by the product-trapezoid rule.
inline SampledFunction solve_abel(const AbelProblem& p) {
    const SampledFunction t = sample_fall_time(p);
    const double c = std::sqrt(2.0 * p.g / detail::kPi);
    std::vector<double> rhs = t.values();
    for (double& x : rhs) x *= c;
    return frac_integral_num(SampledFunction(t.grid(), std::move(rhs)), FracOrder(0.5), Quadrature::ProductTrapezoid);
}

namespace detail {

// Derivative at x[i] of the parabola through three neighbouring points (one-sided at the ends).
inline double three_point_derivative(const std::vector<double>& x, const std::vector<double>& f, std::size_t i) {
    const std::size_t last = x.size() - 1;
    const std::size_t j = i == 0 ? 1 : (i == last ? last - 1 : i);
    const double x0 = x[j - 1], x1 = x[j], x2 = x[j + 1];
    const double t = x[i];
    return f[j - 1] * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f[j] * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f[j + 1] * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

}  // namespace detail

/// Curve psi(y) with psi(0) = 0 from the arc length. With r = sqrt(eta),
///   psi(y) = int_0^sqrt(y) sqrt((ds/dr)^2 - 4 r^2) dr,
/// whose integrand stays bounded when s grows like sqrt(y). ds/dr comes from three-point
/// differences on the r-nodes and the integral from the trapezoid rule. The slope
/// s' = (ds/dr) / (2 r) is checked at interior nodes.
inline SampledFunction curve_from_arclength(const SampledFunction& s) {
    s.require_finite_origin("curve_from_arclength");
    const UniformGrid& grid = s.grid();
    const std::size_t n = grid.n_steps();
    if (n < 2) throw DomainError("curve_from_arclength: need at least two steps");

    std::vector<double> r(grid.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = std::sqrt(grid.node(k));
    std::vector<double> integrand(grid.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double ds_dr = detail::three_point_derivative(r, s.values(), k);
        if (k > 0 && k < n && ds_dr / (2.0 * r[k]) < 1.0 - 1e-6) {
            throw InconsistentArcLength("arc length grows slower than height at y = " + std::to_string(grid.node(k)) +
                                        " (s' = " + std::to_string(ds_dr / (2.0 * r[k])) + ")");
        }
        integrand[k] = std::sqrt(std::max(ds_dr * ds_dr - 4.0 * r[k] * r[k], 0.0));
    }
    std::vector<double> psi(grid.size(), 0.0);
    detail::CompensatedSum<double> acc;
    for (std::size_t k = 0; k < n; ++k) {
        acc.add(0.5 * (r[k + 1] - r[k]) * (integrand[k] + integrand[k + 1]));
        psi[k + 1] = acc.value();
    }
    return SampledFunction(grid, std::move(psi));
}

/// Fall time T(y_n) from the arc length. On each cell s is taken linear in sqrt(eta), so
/// s'(eta) = m / (2 sqrt(eta)) and the singular integral reduces to a difference of arcsines.
/// Exact whenever s is proportional to sqrt(y).
inline SampledFunction abel_forward(const SampledFunction& s, double g) {
    s.require_finite_origin("abel_forward");
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("abel_forward: g must be finite and > 0");
    const UniformGrid& grid = s.grid();
    const std::size_t n_nodes = grid.size();
    std::vector<double> root(n_nodes);
    std::vector<double> m(grid.n_steps());
    for (std::size_t k = 0; k < n_nodes; ++k) root[k] = std::sqrt(grid.node(k));
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = (s[k + 1] - s[k]) / (root[k + 1] - root[k]);

    const double scale = 1.0 / std::sqrt(2.0 * g);
    std::vector<double> out(n_nodes, 0.0);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        const double y = grid.node(n);
        detail::CompensatedSum<double> acc;
        double prev = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double next = k + 1 == n ? detail::kPi / 2.0 : std::asin(std::sqrt(grid.node(k + 1) / y));
            acc.add(m[k] * (next - prev));
            prev = next;
        }
        out[n] = scale * acc.value();
    }
    // T(0) is the limit of the leading term m_0 pi / 2
    out[0] = scale * m[0] * detail::kPi / 2.0;
    return SampledFunction(grid, std::move(out));
}

/// Closed form s(y) = (2 k sqrt(2g) / pi) sqrt(y) of the tautochrone with fall time k.
inline double tautochrone_arclength(double k, double g, double y) { return 2.0 * k * std::sqrt(2.0 * g) / detail::kPi * std::sqrt(y); }

}  // namespace fraccalc
