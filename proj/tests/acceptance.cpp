// Acceptance run: one PASS/FAIL line per criterion, non-zero exit status if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fraccalc/linode.hpp"
#include "fraccalc/operators.hpp"
#include "fraccalc/roughheston.hpp"
#include "fraccalc/solver.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/stability.hpp"
#include "fraccalc/tautochrone.hpp"
#include "oracles.hpp"

using namespace fraccalc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

UniformGrid unit_grid(int log2_steps) { return UniformGrid::from_horizon(1.0, std::ldexp(1.0, -log2_steps)); }

void special_functions(Outcome& o) {
    const double e5 = rel(fraccalc::gamma(5.0), 24.0);
    const double ehalf = rel(fraccalc::gamma(0.5), std::sqrt(kPi));
    const double eneg = rel(fraccalc::gamma(-0.5), -2.0 * std::sqrt(kPi));
    const double spot = std::max({e5, ehalf, eneg});
    o.require(spot <= 1e-12, "Gamma spot values");

    double exp_err = 0.0;
    const MLParams one(1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double z = -30.0 + 60.0 * i / 199.0;
        exp_err = std::max(exp_err, rel(mittag_leffler(one, z), std::exp(z)));
    }
    o.require(exp_err <= 1e-10, "E_{1,1} vs exp");
    const double cosh_err = rel(mittag_leffler(MLParams(2.0, 1.0), 1.0), std::cosh(1.0));
    o.require(cosh_err <= 1e-10, "E_{2,1}(1) vs cosh 1");
    o.detail << "Gamma rel " << spot << ", E_{1,1} rel " << exp_err << ", E_{2,1}(1) rel " << cosh_err;
}

void monomial_algebra(Outcome& o) {
    oracle::Gen gen(2);
    double semigroup = 0.0, inverse = 0.0, closed = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double a = gen.uniform(0.05, 3.0);
        const double b = gen.uniform(0.05, 3.0);
        const Monomial m{gen.uniform(-2.0, 2.0), gen.uniform(-0.95, 4.0)};
        const Monomial lhs = frac_integral_monomial(FracOrder(a), frac_integral_monomial(FracOrder(b), m));
        const Monomial rhs = frac_integral_monomial(FracOrder(a + b), m);
        semigroup = std::max({semigroup, rel(lhs.coefficient, rhs.coefficient), std::abs(lhs.exponent - rhs.exponent)});

        const Monomial back = rl_derivative_monomial(FracOrder(a), frac_integral_monomial(FracOrder(a), m));
        inverse = std::max({inverse, rel(back.coefficient, m.coefficient), std::abs(back.exponent - m.exponent)});

        // derivative of a monomial against an independent Gamma
        const Monomial d = rl_derivative_monomial(FracOrder(a), m);
        const double g = oracle::tgamma(m.exponent - a + 1.0);
        const double want = m.coefficient * oracle::tgamma(m.exponent + 1.0) / g;
        closed = std::max(closed, std::isinf(g) || want == 0.0 ? std::abs(d.coefficient) : rel(d.coefficient, want));
    }
    o.require(semigroup <= 1e-12, "semigroup");
    o.require(inverse <= 1e-12, "dRL I = id");
    o.require(closed <= 1e-12, "monomial derivative");
    o.detail << "semigroup " << semigroup << ", dRL I_a " << inverse << ", d t^b " << closed;
}

void numeric_operators(Outcome& o) {
    const UniformGrid grid = unit_grid(12);
    const std::function<double(double)> t1 = [](double t) { return t; };
    const std::function<double(double)> t2 = [](double t) { return t * t; };
    double worst_i = 0.0, worst_c = 0.0, worst_rl = 0.0, worst_gl = 0.0;
    for (double a : {0.3, 0.5, 0.8}) {
        const FracOrder al(a);
        for (int p : {1, 2}) {
            const auto& fn = p == 1 ? t1 : t2;
            const Monomial m{1.0, static_cast<double>(p)};
            const Monomial im = frac_integral_monomial(al, m);
            const Monomial dm = rl_derivative_monomial(al, m);
            const auto f = SampledFunction::sample(grid, fn);
            const auto i = frac_integral_num(f, al);
            const auto c = caputo_derivative_num(f, al);
            const auto r = rl_derivative_num(f, al);
            for (std::size_t n = 1; n < grid.size(); ++n) {
                const double t = grid.node(n);
                worst_i = std::max(worst_i, std::abs(i[n] - im(t)));
                worst_c = std::max(worst_c, std::abs(c[n] - dm(t)));
                worst_rl = std::max(worst_rl, std::abs(r[n] - dm(t)));
                if (n % 8 == 0) worst_gl = std::max(worst_gl, std::abs(gl_derivative(fn, t, al, 1u << 14) - dm(t)));
            }
        }
    }
    o.require(std::max({worst_i, worst_c, worst_rl, worst_gl}) <= 1e-2, "closed-form agreement");

    double constant = 0.0;
    for (double a : {0.3, 0.5, 0.8}) {
        const auto c = caputo_derivative_num(SampledFunction::sample(grid, [](double) { return 3.7; }), FracOrder(a));
        for (std::size_t n = 1; n < grid.size(); ++n) constant = std::max(constant, std::abs(c[n]));
    }
    o.require(constant == 0.0, "dC of constants");

    const auto fn = [](double t) { return 1.0 + std::sin(2.0 * t); };
    const auto f = SampledFunction::sample(grid, fn);
    const auto rl = rl_derivative_num(f, FracOrder(0.5));
    const auto c = caputo_derivative_num(f, FracOrder(0.5));
    double correction = 0.0, cross = 0.0;
    for (std::size_t n = 1; n < grid.size(); ++n) {
        const double t = grid.node(n);
        correction = std::max(correction, std::abs(rl[n] - c[n] - f[0] / std::sqrt(kPi * t)));
        if (n % 8 == 0) cross = std::max(cross, std::abs(rl[n] - gl_derivative(fn, t, FracOrder(0.5), 1u << 14)));
    }
    o.require(correction <= 1e-12, "RL-Caputo correction");
    o.require(cross <= 1e-2, "RL vs GL");
    o.detail << "sup err I " << worst_i << ", dC " << worst_c << ", dRL " << worst_rl << ", dGL " << worst_gl
             << "; dC const " << constant << "; correction " << correction << ", RL vs GL " << cross;
}

// E_{1/2}(-t^{1/2}) on the finest grid; coarser dyadic grids are subsets of it
const std::vector<double>& linear_oracle() {
    static const std::vector<double> table = [] {
        const UniformGrid fine = unit_grid(12);
        std::vector<double> v(fine.size());
        for (std::size_t n = 0; n < v.size(); ++n) v[n] = oracle::caputo_linear(0.5, -1.0, 1.0, fine.node(n));
        return v;
    }();
    return table;
}

double sup_linear_error(const SolutionPath& p) {
    const std::vector<double>& exact = linear_oracle();
    const std::size_t stride = (exact.size() - 1) / p.grid().n_steps();
    double e = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) e = std::max(e, std::abs(p.value(n) - exact[n * stride]));
    return e;
}

bool alpha_one_bit_match() {
    const UniformGrid grid = unit_grid(9);
    const double tau = grid.tau();
    const auto f = [](double t, double u) { return std::sin(t) - u * u; };
    const FracIVP ivp = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(1.0), f, 0.3, 1.0);
    const auto ex = solve_explicit_euler(ivp, grid);
    const auto im = solve_implicit_euler(ivp, grid);
    const auto ad = solve_adams_pc(ivp, grid);
    bool ok = true;
    double fe = 0.3;
    State be{0.3};
    std::vector<double> fs{f(0.0, 0.3)};
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        fe = fe + tau * f(grid.node(n), fe);
        ok = ok && ex.value(n + 1) == fe;

        const State guess{be[0] + tau * f(grid.node(n), be[0])};
        be = detail::solve_implicit_step(ivp.rhs, grid.node(n + 1), tau, be, guess, SolverOptions{}, n + 1);
        ok = ok && im.value(n + 1) == be[0];

        double pred = 0.3, corr = 0.3;
        for (std::size_t k = 0; k <= n; ++k) {
            pred += tau * fs[k];
            corr += (k == 0 ? tau / 2.0 : tau) * fs[k];
        }
        const double heun = corr + tau / 2.0 * f(grid.node(n + 1), pred);
        ok = ok && ad.value(n + 1) == heun;
        fs.push_back(f(grid.node(n + 1), heun));
    }
    return ok;
}

void linear_convergence(Outcome& o) {
    const FracIVP ivp = FracIVP::scalar(DerivativeKind::Caputo, FracOrder(0.5), [](double, double u) { return -u; }, 1.0, 1.0);
    std::vector<double> err[3];
    for (int e = 6; e <= 12; ++e) {
        const UniformGrid grid = unit_grid(e);
        err[0].push_back(sup_linear_error(solve_explicit_euler(ivp, grid)));
        err[1].push_back(sup_linear_error(solve_implicit_euler(ivp, grid)));
        err[2].push_back(sup_linear_error(solve_adams_pc(ivp, grid)));
    }
    const char* names[3] = {"explicit", "implicit", "adams"};
    for (int m = 0; m < 3; ++m) {
        for (std::size_t i = 1; i < err[m].size(); ++i) o.require(err[m][i] < err[m][i - 1], std::string(names[m]) + " decreasing");
        o.detail << names[m] << " " << err[m].front() << " -> " << err[m].back() << ", ";
    }
    for (std::size_t i = 0; i < err[0].size(); ++i) o.require(err[2][i] <= err[0][i], "adams <= explicit");
    const bool bits = alpha_one_bit_match();
    o.require(bits, "alpha=1 bit match");
    o.detail << "alpha=1 bit-match " << (bits ? "yes" : "no");
}

void rl_solver(Outcome& o) {
    const UniformGrid grid = unit_grid(10);
    const FracIVP ivp =
        FracIVP::scalar(DerivativeKind::RiemannLiouville, FracOrder(0.5), [](double, double u) { return -u; }, 1.0, 1.0);
    const auto p = solve_implicit_euler(ivp, grid);
    double e = 0.0;
    for (std::size_t n = grid.n_steps() / 10; n < grid.size(); ++n) {
        e = std::max(e, std::abs(p.value(n) - oracle::rl_linear(0.5, -1.0, 1.0, grid.node(n))));
    }
    o.require(e <= 5e-2, "sup error");
    o.detail << "sup err over n >= N/10: " << e;
}

void stability(Outcome& o) {
    oracle::Gen gen(7);
    int agree = 0, tried = 0;
    while (tried < 50) {
        const double a = gen.uniform(0.3, 1.5);
        const double arg = gen.uniform(-kPi, kPi);
        const double mod = gen.uniform(0.5, 3.0);
        if (std::abs(std::abs(arg) - a * kPi / 2.0) < 0.1) continue;
        ++tried;
        const complex l = std::polar(mod, arg);
        const DecayProbe p = ml_decay_probe(FracOrder(a), l, 640.0 / std::pow(mod, 1.0 / a));
        agree += (matignon_check(FracOrder(a), l) == Verdict::Stable) == (p.trend == Trend::Decays);
    }
    o.require(agree == 50, "probe agreement");

    int mask_bad = 0;
    for (const RegionSample& s : stability_region_sample(FracOrder(1.0), {-3.0, 3.0, 61}, {-3.0, 3.0, 61})) {
        if (s.re != 0.0 && s.stable != (s.re < 0.0)) ++mask_bad;
    }
    o.require(mask_bad == 0, "alpha=1 mask");

    oracle::Gen tri(6);
    int mono_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        double a1 = tri.uniform(0.01, 1.99);
        double a2 = tri.uniform(0.01, 1.99);
        if (a1 > a2) std::swap(a1, a2);
        const complex l = std::polar(tri.uniform(0.01, 10.0), tri.uniform(-kPi, kPi));
        if (matignon_check(FracOrder(a2), l) == Verdict::Stable && matignon_check(FracOrder(a1), l) != Verdict::Stable) {
            ++mono_bad;
        }
    }
    o.require(mono_bad == 0, "sector monotonicity");
    o.detail << "probe agreement " << agree << "/50, alpha=1 mask mismatches " << mask_bad
             << ", monotonicity violations " << mono_bad << "/1000";
}

void tautochrone(Outcome& o) {
    const double k = 1.0, g = 9.81;
    const auto s = solve_abel({[k](double) { return k; }, g, 1.0, 4096});
    const double a = 2.0 * g * k * k / (kPi * kPi);
    double s_err = 0.0, psi_err = 0.0;
    const auto psi = curve_from_arclength(s);
    for (std::size_t n = 1; n < s.size(); ++n) {
        const double y = s.grid().node(n);
        if (y >= 0.1) s_err = std::max(s_err, rel(s[n], 2.0 * k * std::sqrt(2.0 * g) / kPi * std::sqrt(y)));
        if (n % 16 == 0) {
            const double cyc = oracle::integrate([a](double eta) { return std::sqrt(a / eta - 1.0); }, 0.0, y);
            psi_err = std::max(psi_err, std::abs(psi[n] - cyc));
        }
    }
    o.require(s_err <= 1e-3, "arc length");
    o.require(psi_err <= 1e-2, "cycloid");

    const auto back = abel_forward(solve_abel({[](double y) { return 1.0 + y; }, g, 1.0, 4096}), g);
    double rt = 0.0;
    for (std::size_t n = 0; n < back.size(); ++n) rt = std::max(rt, std::abs(back[n] - (1.0 + back.grid().node(n))));
    o.require(rt <= 1e-2, "round trip");
    o.detail << "s rel err on [0.1,1] " << s_err << ", psi vs cycloid " << psi_err << ", round trip " << rt;
}

RoughHestonParams heston_params(double xi) {
    RoughHestonParams p;
    p.alpha = 0.6;
    p.kappa = 2.0;
    p.theta = 0.04;
    p.v0 = 0.09;
    p.xi = xi;
    return p;
}

// theta + (V0 - theta) E_{0.6}(-2 t^{0.6}) at the nodes of the 2^-10 grid
const std::vector<double>& heston_curve() {
    static const std::vector<double> table = [] {
        const RoughHestonParams p = heston_params(0.0);
        const UniformGrid grid = unit_grid(10);
        std::vector<double> v(grid.size());
        for (std::size_t n = 0; n < v.size(); ++n) {
            v[n] = p.theta + (p.v0 - p.theta) * oracle::mittag_leffler(p.alpha, 1.0, -p.kappa * std::pow(grid.node(n), p.alpha));
        }
        return v;
    }();
    return table;
}

void heston_deterministic(Outcome& o) {
    const RoughHestonParams p = heston_params(0.0);
    const auto st = simulate_rough_heston({p, unit_grid(10), 1, 1, false});
    double e = 0.0;
    for (std::size_t n = 0; n < st.grid.size(); ++n) e = std::max(e, std::abs(st.mean_v[n] - heston_curve()[n]));
    o.require(e <= 1e-2, "sup error");
    o.detail << "sup err " << e;
}

void heston_stochastic(Outcome& o) {
    const RoughHestonParams p = heston_params(0.3);
    const McRun run{p, unit_grid(10), 10000, 42, false};
    const auto st = simulate_rough_heston(run);
    std::size_t outside = 0;
    double worst = 0.0;
    for (std::size_t n = 1; n < st.grid.size(); ++n) {
        const double z = std::abs(st.mean_v[n] - heston_curve()[n]) / st.se_v(n);
        worst = std::max(worst, z);
        if (z > 3.0) ++outside;
    }
    o.require(outside == 0, "every node within 3 SE");
    const auto again = simulate_rough_heston(run);
    const bool same = again.mean_v == st.mean_v && again.sd_v == st.sd_v && again.mean_s == st.mean_s;
    o.require(same, "bit-identical rerun");
    o.detail << "seed 42, truncation " << to_string(p.truncation) << ": nodes outside 3 SE " << outside << "/"
             << st.grid.n_steps() << ", worst |z| " << worst << ", rerun identical " << (same ? "yes" : "no");
}

void gbm(Outcome& o) {
    RoughHestonParams p;
    p.v0 = 0.0;
    p.mu = 0.03;
    const auto det = simulate_gbm({p, unit_grid(8), 100, 42, false});
    bool exact = true;
    double s = p.s0;
    for (std::size_t n = 0; n < det.grid.size(); ++n) {
        exact = exact && det.mean_s[n] == s && det.sd_s[n] == 0.0;
        s *= 1.0 + p.mu * det.grid.tau();
    }
    o.require(exact, "sigma=0 recursion");

    p.v0 = 0.04;
    p.mu = 0.0;
    const auto st = simulate_gbm({p, unit_grid(8), 10000, 42, false});
    const std::size_t last = st.grid.n_steps();
    const double z = std::abs(st.mean_s[last] - p.s0) / st.se_s(last);
    o.require(z <= 3.0, "driftless mean");
    o.detail << "sigma=0 exact " << (exact ? "yes" : "no") << ", driftless |mean - S0| / SE " << z;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, void (*)(Outcome&)>> criteria = {
        {"special functions", special_functions},
        {"monomial operator algebra", monomial_algebra},
        {"numeric vs closed-form operators", numeric_operators},
        {"linear IVP convergence", linear_convergence},
        {"Riemann-Liouville solver", rl_solver},
        {"stability", stability},
        {"tautochrone", tautochrone},
        {"rough Heston deterministic limit", heston_deterministic},
        {"rough Heston stochastic mean", heston_stochastic},
        {"GBM sanity", gbm},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        o.detail.precision(3);
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.str().c_str(), took.count());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
