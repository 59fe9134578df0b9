#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fraccalc/linode.hpp"
#include "fraccalc/solver.hpp"
#include "oracles.hpp"

using namespace fraccalc;

namespace {

UniformGrid unit_grid(int log2_steps) { return UniformGrid::from_horizon(1.0, std::ldexp(1.0, -log2_steps)); }

FracIVP decay(double alpha, DerivativeKind kind = DerivativeKind::Caputo, double lambda = -1.0) {
    return FracIVP::scalar(kind, FracOrder(alpha), [lambda](double, double u) { return lambda * u; }, 1.0, 1.0);
}

double sup_error_vs_oracle(const SolutionPath& p, double alpha, double lambda) {
    double e = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        e = std::max(e, std::abs(p.value(n) - caputo_linear_value(FracOrder(alpha), lambda, 1.0, p.grid().node(n))));
    }
    return e;
}

const double kE05 = 0.42758357615580700441;     // E_{1/2}(-1)
const double kE0505 = 0.13660600739194928254;   // E_{1/2,1/2}(-1)

}  // namespace

TEST(ExplicitEuler, Examples) {
    const UniformGrid grid = unit_grid(10);
    const auto c = solve_explicit_euler(FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.4),
                                                        [](double, double) { return 0.0; }, 2.5, 1.0),
                                        grid);
    for (std::size_t n = 0; n < grid.size(); ++n) EXPECT_EQ(c.value(n), 2.5);
    EXPECT_NEAR(solve_explicit_euler(decay(1.0), grid).value(grid.n_steps()), std::exp(-1.0), 5e-3);
    EXPECT_NEAR(solve_explicit_euler(decay(0.5), grid).value(grid.n_steps()), kE05, 1e-2);
}

TEST(ImplicitEuler, Examples) {
    const UniformGrid grid = unit_grid(10);
    const auto c = solve_implicit_euler(FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.4),
                                                        [](double, double) { return 0.0; }, -1.5, 1.0),
                                        grid);
    for (std::size_t n = 0; n < grid.size(); ++n) EXPECT_EQ(c.value(n), -1.5);
    EXPECT_NEAR(solve_implicit_euler(decay(0.5), grid).value(grid.n_steps()), kE05, 1e-2);
    const auto rl = solve_implicit_euler(decay(0.5, DerivativeKind::RiemannLiouville), grid);
    EXPECT_TRUE(std::isnan(rl.value(0)));
    EXPECT_TRUE(rl.meta().singular_origin);
    EXPECT_NEAR(rl.value(grid.n_steps()), kE0505, 5e-2);
}

TEST(AdamsPc, Examples) {
    const UniformGrid grid = unit_grid(10);
    const auto c = solve_adams_pc(FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.4),
                                                  [](double, double) { return 0.0; }, 7.0, 1.0),
                                  grid);
    for (std::size_t n = 0; n < grid.size(); ++n) EXPECT_EQ(c.value(n), 7.0);

    const double e1 = std::abs(solve_adams_pc(decay(1.0), unit_grid(8)).value(256) - std::exp(-1.0));
    const double e2 = std::abs(solve_adams_pc(decay(1.0), unit_grid(9)).value(512) - std::exp(-1.0));
    EXPECT_GE(e1 / e2, 3.5);

    const double adams = std::abs(solve_adams_pc(decay(0.5), grid).value(grid.n_steps()) - kE05);
    const double expl = std::abs(solve_explicit_euler(decay(0.5), grid).value(grid.n_steps()) - kE05);
    EXPECT_LT(adams, expl);
}

TEST(AdamsPc, EmpiricalOrderOnSmoothSolution) {
    // u = t^2 solves dC u = 2 t^(2-a) / Gamma(3-a) + t^2 - u
    for (double a : {0.3, 0.5, 0.8}) {
        const double g = oracle::tgamma(3.0 - a);
        const FracIVP ivp = FracIVP::scalar(
            DerivativeKind::Caputo, FracOrder(a),
            [a, g](double t, double u) { return 2.0 * std::pow(t, 2.0 - a) / g + t * t - u; }, 0.0, 1.0);
        const auto err = [&](int e) {
            const auto p = solve_adams_pc(ivp, unit_grid(e));
            double m = 0.0;
            for (std::size_t n = 0; n < p.size(); ++n) m = std::max(m, std::abs(p.value(n) - p.grid().node(n) * p.grid().node(n)));
            return m;
        };
        const double order = std::log2(err(8) / err(9));
        EXPECT_GE(order, std::min(2.0, 1.0 + a) - 0.3) << a;
    }
}

TEST(AlphaOne, ExplicitBitMatchesForwardEuler) {
    const UniformGrid grid = unit_grid(9);
    const auto f = [](double t, double u) { return std::sin(t) - u * u; };
    const auto path = solve_explicit_euler(FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0), f, 0.3, 1.0), grid);
    double u = 0.3;
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        u = u + grid.tau() * f(grid.node(n), u);
        ASSERT_EQ(path.value(n + 1), u) << n;
    }
}

TEST(AlphaOne, ImplicitBitMatchesBackwardEuler) {
    const UniformGrid grid = unit_grid(9);
    const auto f = [](double t, double u) { return std::sin(t) - u * u; };
    const FracIVP ivp = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0), f, 0.3, 1.0);
    const auto path = solve_implicit_euler(ivp, grid);
    // classical backward Euler U_{n+1} = U_n + tau f(t_{n+1}, U_{n+1}), forward-Euler start value
    State u{0.3};
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        const State guess{u[0] + grid.tau() * f(grid.node(n), u[0])};
        u = detail::solve_implicit_step(ivp.rhs, grid.node(n + 1), grid.tau(), u, guess, SolverOptions{}, n + 1);
        ASSERT_EQ(path.value(n + 1), u[0]) << n;
    }
}

TEST(AlphaOne, AdamsBitMatchesTrapezoidPece) {
    const UniformGrid grid = unit_grid(9);
    const double tau = grid.tau();
    const auto f = [](double t, double u) { return std::cos(2.0 * t) - 0.5 * u; };
    const auto path = solve_adams_pc(FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0), f, 1.0, 1.0), grid);
    // Heun in cumulative form: predictor u0 + tau sum f_k, corrector u0 + trapezoid sum
    std::vector<double> fs{f(0.0, 1.0)};
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        double pred = 1.0;
        double corr = 1.0;
        for (std::size_t k = 0; k <= n; ++k) {
            pred += tau * fs[k];
            corr += (k == 0 ? tau / 2.0 : tau) * fs[k];
        }
        const double u = corr + tau / 2.0 * f(grid.node(n + 1), pred);
        ASSERT_EQ(path.value(n + 1), u) << n;
        fs.push_back(f(grid.node(n + 1), u));
    }
}

TEST(Convergence, LinearBenchmarkMonotoneForAllMethods) {
    for (Method m : {Method::Explicit, Method::Implicit, Method::Adams}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int e = 6; e <= 12; ++e) {
            const double err = sup_error_vs_oracle(solve(decay(0.5), unit_grid(e), m), 0.5, -1.0);
            EXPECT_LT(err, prev) << static_cast<int>(m) << " " << e;
            prev = err;
        }
    }
}

TEST(Memory, PerturbingHistoryChangesLaterSteps) {
    const UniformGrid grid = unit_grid(6);
    const FracIVP ivp = decay(0.6);
    const auto path = solve_explicit_euler(ivp, grid);
    const KernelWeights w(ivp.alpha, grid);
    const std::size_t n = 40;
    std::vector<State> history;
    for (std::size_t k = 0; k < n; ++k) history.push_back({path.value(k)});
    EXPECT_EQ(explicit_euler_next(ivp, w, history)[0], path.value(n));
    oracle::Gen gen(401);
    for (int i = 0; i < 20; ++i) {
        const std::size_t j = 1 + gen.index(n - 1);
        auto perturbed = history;
        perturbed[j][0] += 1e-3;
        EXPECT_NE(explicit_euler_next(ivp, w, perturbed)[0], path.value(n)) << j;
    }
}

TEST(Vector, DiagonalSystemMatchesScalarSolves) {
    const UniformGrid grid = unit_grid(8);
    const FracIVP sys{DerivativeKind::Caputo, FracOrder(0.7),
                      [](double t, const State& u) { return State{-u[0] + t, -2.0 * u[1] * u[1]}; },
                      State{1.0, 0.5}, 1.0};
    const FracIVP a = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.7), [](double t, double u) { return -u + t; }, 1.0, 1.0);
    const FracIVP b = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.7), [](double, double u) { return -2.0 * u * u; }, 0.5, 1.0);
    for (Method m : {Method::Explicit, Method::Implicit, Method::Adams}) {
        const auto ps = solve(sys, grid, m);
        const auto pa = solve(a, grid, m);
        const auto pb = solve(b, grid, m);
        const double tol = m == Method::Implicit ? 1e-11 : 0.0;
        for (std::size_t n = 0; n < grid.size(); ++n) {
            EXPECT_NEAR(ps.value(n, 0), pa.value(n), tol);
            EXPECT_NEAR(ps.value(n, 1), pb.value(n), tol);
        }
    }
}

TEST(Nonlinear, ImplicitTracksMittagLefflerSolution) {
    // f = lambda u + c (u - u*(t))^2 has the exact solution u* = E_a(lambda t^a)
    const double a = 0.6;
    const double lambda = -1.2;
    const FracIVP ivp = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(a),
                                        [=](double t, double u) {
                                            const double d = u - caputo_linear_value(FracOrder(a), lambda, 1.0, t);
                                            return lambda * u + 3.0 * d * d;
                                        },
                                        1.0, 1.0);
    for (Method m : {Method::Implicit, Method::Adams}) {
        EXPECT_LT(sup_error_vs_oracle(solve(ivp, unit_grid(9), m), a, lambda), 1e-2);
    }
}

TEST(Errors, RiemannLiouvilleNeedsImplicitStart) {
    const UniformGrid grid = unit_grid(4);
    EXPECT_THROW(solve_explicit_euler(decay(0.5, DerivativeKind::RiemannLiouville), grid), ModelRestriction);
    EXPECT_THROW(solve_adams_pc(decay(0.5, DerivativeKind::RiemannLiouville), grid), ModelRestriction);
}

TEST(Errors, RhsFailuresCarryStep) {
    const UniformGrid grid = unit_grid(4);
    const FracIVP bad = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.5),
                                        [](double t, double u) {
                                            if (t > 0.5) throw std::runtime_error("boom");
                                            return -u;
                                        },
                                        1.0, 1.0);
    try {
        solve_explicit_euler(bad, grid);
        FAIL();
    } catch (const RhsEvaluationError& e) {
        EXPECT_EQ(e.step(), 9u);
    }
    const FracIVP nan = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.5),
                                        [](double, double) { return std::nan(""); }, 1.0, 1.0);
    EXPECT_THROW(solve_adams_pc(nan, grid), RhsEvaluationError);
    EXPECT_THROW(solve_implicit_euler(nan, grid), RhsEvaluationError);
}

TEST(Errors, OverflowIsFlaggedAndStopsTheRun) {
    const UniformGrid grid = UniformGrid::from_horizon(2.0, 1.0 / 64.0);
    const FracIVP blow = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0),
                                         [](double, double u) { return u * u * u; }, 1.0, 2.0);
    const auto p = solve_explicit_euler(blow, grid);
    ASSERT_TRUE(p.meta().overflow);
    const std::size_t k = *p.meta().overflow_step;
    EXPECT_GT(k, 0u);
    EXPECT_TRUE(std::isfinite(p.value(k - 1)));
    for (std::size_t n = k + 1; n < grid.size(); ++n) EXPECT_TRUE(std::isnan(p.value(n)));
}

TEST(Errors, UnsolvableImplicitStep) {
    // U - 0.5 (1 + U^2) = 1 has no real root
    const FracIVP ivp = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0),
                                        [](double, double u) { return 1.0 + u * u; }, 1.0, 1.0);
    try {
        solve_implicit_euler(ivp, UniformGrid(0.5, 2));
        FAIL();
    } catch (const NonlinearSolveFailure& e) {
        EXPECT_EQ(e.step(), 1u);
    }
}

TEST(Errors, ProblemValidation) {
    EXPECT_THROW(solve_explicit_euler(decay(1.5), unit_grid(3)), DomainError);
    EXPECT_THROW(solve_explicit_euler(decay(0.5), UniformGrid::from_horizon(2.0, 0.25)), DomainError);
    FracIVP empty = decay(0.5);
    empty.datum.clear();
    EXPECT_THROW(solve_explicit_euler(empty, unit_grid(3)), DomainError);
    SolverOptions opt;
    opt.corrector_iterations = 0;
    EXPECT_THROW(solve_adams_pc(decay(0.5), unit_grid(3), opt), DomainError);
}

TEST(AdamsPc, RepeatedCorrectionsReachAFixedPoint) {
    const UniformGrid grid = unit_grid(7);
    SolverOptions a;
    SolverOptions b;
    a.corrector_iterations = 40;
    b.corrector_iterations = 80;
    const auto pa = solve_adams_pc(decay(0.5), grid, a);
    const auto pb = solve_adams_pc(decay(0.5), grid, b);
    for (std::size_t n = 0; n < grid.size(); ++n) EXPECT_NEAR(pa.value(n), pb.value(n), 1e-15);
}
