#pragma once

// Seeded Monte Carlo for
//   GBM:           S_{n+1} = S_n (1 + mu tau + sigma sqrt(tau) X_n)
//   rough Heston:  V(t) = V0 + int_0^t kappa (theta - V) K_alpha(t - s) ds + int_0^t xi sqrt(V) K_alpha(t - s) dB_s
//   classical:     the same with alpha = 1
// with the asset driven by W = rho B + sqrt(1 - rho^2) B_perp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fraccalc/detail/compensated.hpp"
#include "fraccalc/error.hpp"
#include "fraccalc/kernel_weights.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

enum class Truncation {
    Full,     ///< max(V, 0) in drift and diffusion
    Partial,  ///< max(V, 0) in the diffusion only; the drift sees V itself
};

inline const char* to_string(Truncation t) noexcept { return t == Truncation::Full ? "full" : "partial"; }

struct RoughHestonParams {
    double v0 = 0.04;
    double kappa = 2.0;
    double theta = 0.04;
    std::optional<double> xi;  ///< vol-of-vol; defaults to kappa
    double alpha = 1.0;
    double rho = 0.0;
    double s0 = 100.0;
    double mu = 0.0;
    Truncation truncation = Truncation::Partial;

    [[nodiscard]] double vol_of_vol() const noexcept { return xi.value_or(kappa); }

    void validate() const {
        const auto finite = [](double x) { return std::isfinite(x); };
        if (!finite(v0) || v0 < 0.0) throw DomainError("heston: V0 must be >= 0");
        if (!finite(kappa) || !(kappa > 0.0)) throw DomainError("heston: kappa must be > 0");
        if (!finite(theta) || theta < 0.0) throw DomainError("heston: theta must be >= 0");
        if (!finite(vol_of_vol()) || vol_of_vol() < 0.0) throw DomainError("heston: xi must be >= 0");
        if (!finite(alpha) || !(alpha > 0.5) || alpha > 1.0) {
            throw DomainError("heston: alpha must lie in (0.5, 1]; the squared kernel is not integrable for alpha <= 0.5");
        }
        if (!finite(rho) || rho < -1.0 || rho > 1.0) throw DomainError("heston: rho must lie in [-1, 1]");
        if (!finite(s0) || !(s0 > 0.0)) throw DomainError("heston: S0 must be > 0");
        if (!finite(mu)) throw DomainError("heston: mu must be finite");
    }
};

struct McRun {
    RoughHestonParams params;
    UniformGrid grid{1.0 / 1024.0, 1024};
    std::size_t n_paths = 1000;
    std::uint64_t seed = 0;
    bool keep_paths = false;

    void validate() const {
        params.validate();
        if (n_paths < 1) throw DomainError("heston: need at least one path");
    }
};

struct McStatistics {
    UniformGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> mean_v, sd_v, mean_s, sd_s;
    /// Row-major n_paths x grid.size() when keep_paths was requested.
    std::vector<double> paths_v, paths_s;

    [[nodiscard]] double se_v(std::size_t n) const { return sd_v[n] / std::sqrt(static_cast<double>(n_paths)); }
    [[nodiscard]] double se_s(std::size_t n) const { return sd_s[n] / std::sqrt(static_cast<double>(n_paths)); }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent, reproducible normal stream for one path.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~path))) {}
    double normal() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_;
};

/// Per-node mean and sample standard deviation, accumulated in path order around the first
/// path's values to limit cancellation.
class NodeMoments {
public:
    explicit NodeMoments(std::size_t nodes) : shift_(nodes), sum_(nodes), sq_(nodes) {}

    void add_path(const std::vector<double>& x) {
        if (count_ == 0) shift_ = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - shift_[i];
            sum_[i].add(d);
            sq_[i].add(d * d);
        }
        ++count_;
    }

    void finish(std::vector<double>& mean, std::vector<double>& sd) const {
        const auto n = static_cast<double>(count_);
        mean.resize(shift_.size());
        sd.resize(shift_.size());
        for (std::size_t i = 0; i < shift_.size(); ++i) {
            const double m = sum_[i].value() / n;
            mean[i] = shift_[i] + m;
            const double var = count_ > 1 ? std::max(sq_[i].value() - n * m * m, 0.0) / (n - 1.0) : 0.0;
            sd[i] = std::sqrt(var);
        }
    }

private:
    std::size_t count_ = 0;
    std::vector<double> shift_;
    std::vector<CompensatedSum<double>> sum_, sq_;
};

/// Square roots of int_{t_k}^{t_{k+1}} K_alpha(t_n - s)^2 ds by lag j = n - k:
/// tau^(2 alpha - 1) (j^(2 alpha - 1) - (j - 1)^(2 alpha - 1)) / ((2 alpha - 1) Gamma(alpha)^2).
inline std::vector<double> noise_weights(double alpha, const UniformGrid& grid) {
    const double e = 2.0 * alpha - 1.0;
    const double g = reciprocal_gamma(alpha);
    const double scale = std::pow(grid.tau(), e) * g * g / e;
    std::vector<double> b(grid.n_steps() + 1, 0.0);
    for (std::size_t j = 1; j < b.size(); ++j) b[j] = std::sqrt(scale * power_increment(e, j));
    return b;
}

struct PathWorkspace {
    std::vector<double> v, s, drift, noise;
    explicit PathWorkspace(std::size_t nodes) : v(nodes), s(nodes), drift(nodes), noise(nodes) {}
};

template <typename Simulate>
McStatistics run_paths(const McRun& run, Simulate&& simulate) {
    run.validate();
    const std::size_t nodes = run.grid.size();
    McStatistics stats{run.grid, run.n_paths, {}, {}, {}, {}, {}, {}};
    NodeMoments mv(nodes), ms(nodes);
    PathWorkspace ws(nodes);
    if (run.keep_paths) {
        stats.paths_v.reserve(run.n_paths * nodes);
        stats.paths_s.reserve(run.n_paths * nodes);
    }
    for (std::size_t p = 0; p < run.n_paths; ++p) {
        PathRng rng(run.seed, p);
        simulate(rng, ws);
        mv.add_path(ws.v);
        ms.add_path(ws.s);
        if (run.keep_paths) {
            stats.paths_v.insert(stats.paths_v.end(), ws.v.begin(), ws.v.end());
            stats.paths_s.insert(stats.paths_s.end(), ws.s.begin(), ws.s.end());
        }
    }
    mv.finish(stats.mean_v, stats.sd_v);
    ms.finish(stats.mean_s, stats.sd_s);
    return stats;
}

/// Standardised increment of W = rho B + sqrt(1 - rho^2) B_perp.
inline double asset_driver(double rho, double z_b, double z_perp) noexcept {
    return rho * z_b + std::sqrt(1.0 - rho * rho) * z_perp;
}

inline double asset_step(double s, double v_plus, double mu, double tau, double rho, double z_b, double z_perp) {
    return s * (1.0 + mu * tau + std::sqrt(v_plus * tau) * asset_driver(rho, z_b, z_perp));
}

/// Drift weights of the variance scheme, by lag.
inline std::vector<double> drift_weights(double alpha, const UniformGrid& grid) {
    const KernelWeights w(FracOrder(alpha), grid);
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t j = 1; j < out.size(); ++j) out[j] = w.lag(j);
    return out;
}

}  // namespace detail

/// Geometric Brownian motion with constant volatility sigma = sqrt(V0). The V statistics are the
/// constant V0.
inline McStatistics simulate_gbm(const McRun& run) {
    const RoughHestonParams& p = run.params;
    const double tau = run.grid.tau();
    const double sigma = std::sqrt(p.v0);
    const double root_tau = std::sqrt(tau);
    return detail::run_paths(run, [&](detail::PathRng& rng, detail::PathWorkspace& ws) {
        ws.s[0] = p.s0;
        ws.v[0] = p.v0;
        for (std::size_t n = 0; n + 1 < ws.s.size(); ++n) {
            const double x = rng.normal();
            ws.s[n + 1] = ws.s[n] * (1.0 + p.mu * tau + sigma * root_tau * x);
            ws.v[n + 1] = p.v0;
        }
    });
}

/// Explicit Volterra-Euler scheme for the rough variance:
///   V_{n+1} = V0 + sum_k kappa (theta - V_k^+) w[n+1][k] + sum_k xi sqrt(V_k^+) b[n+1][k] Z_k
/// where w are the kernel weights and b the square roots of the squared-kernel cell integrals.
inline McStatistics simulate_rough_heston(const McRun& run) {
    const RoughHestonParams& p = run.params;
    run.validate();
    const UniformGrid& grid = run.grid;
    const std::vector<double> lag_w = detail::drift_weights(p.alpha, grid);
    const std::vector<double> b = detail::noise_weights(p.alpha, grid);
    const double tau = grid.tau();
    const double xi = p.vol_of_vol();
    const bool full = p.truncation == Truncation::Full;

    return detail::run_paths(run, [&](detail::PathRng& rng, detail::PathWorkspace& ws) {
        ws.v[0] = p.v0;
        ws.s[0] = p.s0;
        for (std::size_t n = 0; n + 1 < ws.v.size(); ++n) {
            const double vn = ws.v[n];
            const double vp = std::max(vn, 0.0);
            const double z_b = rng.normal();
            const double z_perp = rng.normal();
            ws.drift[n] = p.kappa * (p.theta - (full ? vp : vn));
            ws.noise[n] = xi * std::sqrt(vp) * z_b;

            double acc_d = 0.0;
            double acc_n = 0.0;
            const double* wl = lag_w.data() + n + 1;
            const double* bl = b.data() + n + 1;
            for (std::size_t k = 0; k <= n; ++k) {
                acc_d += ws.drift[k] * *(wl - k);
                acc_n += ws.noise[k] * *(bl - k);
            }
            ws.v[n + 1] = p.v0 + acc_d + acc_n;
            ws.s[n + 1] = detail::asset_step(ws.s[n], vp, p.mu, tau, p.rho, z_b, z_perp);
        }
    });
}

/// Classical Heston variance by Euler-Maruyama, V_{n+1} = V_n + kappa (theta - V_n^+) tau + xi sqrt(V_n^+ tau) Z_n.
/// It consumes the normal stream in the same order as simulate_rough_heston.
inline McStatistics simulate_classical_heston(const McRun& run) {
    RoughHestonParams p = run.params;
    if (p.alpha != 1.0) throw DomainError("simulate_classical_heston: alpha must be 1");
    run.validate();
    const double tau = run.grid.tau();
    const double root_tau = std::sqrt(tau);
    const double xi = p.vol_of_vol();
    const bool full = p.truncation == Truncation::Full;
    return detail::run_paths(run, [&](detail::PathRng& rng, detail::PathWorkspace& ws) {
        ws.v[0] = p.v0;
        ws.s[0] = p.s0;
        for (std::size_t n = 0; n + 1 < ws.v.size(); ++n) {
            const double vn = ws.v[n];
            const double vp = std::max(vn, 0.0);
            const double z_b = rng.normal();
            const double z_perp = rng.normal();
            ws.v[n + 1] = vn + p.kappa * (p.theta - (full ? vp : vn)) * tau + xi * std::sqrt(vp) * root_tau * z_b;
            ws.s[n + 1] = detail::asset_step(ws.s[n], vp, p.mu, tau, p.rho, z_b, z_perp);
        }
    });
}

/// Mean-variance curve theta + (V0 - theta) E_alpha(-kappa t^alpha) solved by the noise-free model.
inline double heston_mean_curve(const RoughHestonParams& p, double t) {
    if (t == 0.0) return p.v0;
    return p.theta + (p.v0 - p.theta) * mittag_leffler(MLParams(p.alpha, 1.0), -p.kappa * std::pow(t, p.alpha));
}

}  // namespace fraccalc
