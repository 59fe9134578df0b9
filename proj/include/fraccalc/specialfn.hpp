#pragma once

// Gamma, Beta and the two-parameter Mittag-Leffler function.
//
// Mittag-Leffler evaluation strategy, for z != 0 with r = |z| and R = r^(1/alpha):
//   * alpha < 2 and R large: asymptotic expansion (exponential branches + algebraic tail),
//     accepted only when its own error estimate is below ~1e-15 relative;
//   * otherwise the power series while r <= 40 or R <= 40. The series is summed in double
//     with compensation; when the terms cancel (sum of |terms| / |sum| > 1e3) it is re-summed
//     in MPFR with enough bits to absorb the cancellation;
//   * anything else raises EvaluationRegionExceeded.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "fraccalc/detail/compensated.hpp"
#include "fraccalc/detail/mpfr_series.hpp"
#include "fraccalc/error.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

using complex = std::complex<double>;

namespace detail {

inline constexpr double kPi = std::numbers::pi;

// Godfrey's g = 7, n = 9 Lanczos coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double zm1) noexcept {
    double x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
    return x;
}

/// Distance from z to the nearest non-positive integer (infinity for z > 0.5).
inline double distance_to_pole(double z) noexcept {
    if (z > 0.5) return std::numeric_limits<double>::infinity();
    return std::abs(z - std::round(z));
}

/// sin(pi x) with argument reduction done before multiplying by pi.
inline double sin_pi(double x) noexcept {
    double r = std::fmod(x, 2.0);
    if (r > 1.0) r -= 2.0;
    if (r < -1.0) r += 2.0;
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    return std::sin(kPi * r);
}

// Exact factorials up to 22!, the largest exactly representable one.
inline constexpr std::array<double, 23> kFactorial = [] {
    std::array<double, 23> f{};
    f[0] = 1.0;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
    return f;
}();

}  // namespace detail

/// Gamma function on the real line.
///
/// Lanczos approximation for z >= 0.5; for smaller non-integer z the iteration property
/// Gamma(z) = Gamma(z + 1) / z is applied until the argument reaches 0.5.
/// Positive integers up to 23 return the exact factorial.
inline double gamma(double z) {
    if (std::isnan(z)) throw DomainError("gamma: NaN argument");
    if (z <= 0.5 && detail::distance_to_pole(z) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) {
        throw NonPositiveIntegerPole("gamma: pole at non-positive integer " + std::to_string(z));
    }
    if (z >= 1.0 && z <= 23.0 && z == std::floor(z)) {
        return detail::kFactorial[static_cast<std::size_t>(z) - 1];
    }
    if (z < 0.5) {
        // Gamma(z) = Gamma(z + m) / (z (z + 1) ... (z + m - 1))
        double denom = 1.0;
        double x = z;
        while (x < 0.5) {
            denom *= x;
            x += 1.0;
        }
        return gamma(x) / denom;
    }
    if (z > 171.7) return std::numeric_limits<double>::infinity();
    const double zm1 = z - 1.0;
    const double t = zm1 + detail::kLanczosG + 0.5;
    // split the power so t^(z-1/2) e^-t does not overflow before the product is formed
    const double half_pow = std::pow(t, 0.5 * (zm1 + 0.5));
    return std::sqrt(2.0 * detail::kPi) * half_pow * (half_pow * std::exp(-t)) * detail::lanczos_sum(zm1);
}

/// log Gamma(z) for z > 0.
inline double log_gamma(double z) {
    if (!(z > 0.0)) throw DomainError("log_gamma: argument must be > 0");
    if (z < 15.0) return std::log(gamma(z));
    const double zm1 = z - 1.0;
    const double t = zm1 + detail::kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * detail::kPi) + (zm1 + 0.5) * std::log(t) - t + std::log(detail::lanczos_sum(zm1));
}

/// 1 / Gamma(z), defined as 0 whenever z lies within 1e-9 of a non-positive integer.
inline double reciprocal_gamma(double z) {
    if (std::isnan(z)) throw DomainError("reciprocal_gamma: NaN argument");
    if (detail::distance_to_pole(z) <= 1e-9) return 0.0;
    if (z >= 0.5) {
        if (z <= 171.0) return 1.0 / gamma(z);
        return std::exp(-log_gamma(z));
    }
    if (z > -170.0) return 1.0 / gamma(z);
    // reflection: 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    return detail::sin_pi(z) * std::exp(log_gamma(1.0 - z)) / detail::kPi;
}

/// Euler Beta function B(z1, z2) = Gamma(z1) Gamma(z2) / Gamma(z1 + z2).
inline double beta(double z1, double z2) {
    if (!(z1 > 0.0) || !(z2 > 0.0)) throw DomainError("beta: both arguments must be > 0");
    const double s = z1 + z2;
    if (s < 171.0) return gamma(z1) * gamma(z2) / gamma(s);
    return std::exp(log_gamma(z1) + log_gamma(z2) - log_gamma(s));
}

/// (alpha, beta) of E_{alpha,beta}; both strictly positive.
struct MLParams {
    double alpha;
    double beta;

    MLParams(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("Mittag-Leffler alpha must be > 0");
        if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("Mittag-Leffler beta must be > 0");
    }
};

namespace detail {

inline constexpr double kSeriesRadius = 40.0;      // |z| always summable by the series
inline constexpr double kSeriesScaledRadius = 40.0;  // |z|^(1/alpha) bound for the series beyond |z| = 40
inline constexpr double kAsymptoticMinScaled = 20.0; // smallest |z|^(1/alpha) at which asymptotics are tried
inline constexpr std::size_t kSeriesTermCap = 10000;
inline constexpr double kDoubleCondLimit = 1e3;

struct SeriesOutcome {
    complex value;
    double abs_sum;  // sum of |terms|
};

// term_n = z^n / Gamma(alpha n + beta), summed in double with compensation.
inline SeriesOutcome ml_series_double(const MLParams& p, complex z) {
    const bool real_z = z.imag() == 0.0;
    const double r = std::abs(z);
    const double theta = std::arg(z);
    const double log_r = std::log(r);
    CompensatedSum<complex> sum;
    double abs_sum = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    int small_run = 0;
    for (std::size_t n = 0; n <= kSeriesTermCap; ++n) {
        const double nd = static_cast<double>(n);
        const double arg = p.alpha * nd + p.beta;
        double mag;
        if (arg <= 170.0) {
            mag = std::pow(r, nd) / gamma(arg);
            if (!std::isfinite(mag)) mag = std::exp(nd * log_r - log_gamma(arg));
        } else {
            mag = std::exp(nd * log_r - log_gamma(arg));
        }
        complex term;
        if (real_z) {
            term = complex((z.real() < 0.0 && (n % 2 == 1)) ? -mag : mag, 0.0);
        } else {
            term = std::polar(mag, nd * theta);
        }
        sum.add(term);
        abs_sum += mag;
        const double cur = std::abs(sum.value());
        if (n > 0 && mag < prev_mag && mag <= 1e-17 * cur) {
            if (++small_run >= 10) return {sum.value(), abs_sum};
        } else {
            small_run = 0;
        }
        prev_mag = mag;
    }
    throw NonConvergence("Mittag-Leffler series did not meet its stopping rule within " +
                         std::to_string(kSeriesTermCap) + " terms");
}

inline complex ml_series(const MLParams& p, complex z) {
    SeriesOutcome out = ml_series_double(p, z);
    double mod = std::abs(out.value);
    double cond = mod > 0.0 ? out.abs_sum / mod : std::numeric_limits<double>::infinity();
    if (cond <= kDoubleCondLimit) return out.value;

    // Cancellation: redo in extended precision. The double result may be pure noise, so the
    // first precision guess assumes at least 2^60 cancellation and is raised until it covers
    // the observed condition number.
    long bits = 64 + static_cast<long>(std::ceil(std::log2(std::max(cond, 1e18))));
    for (int attempt = 0; attempt < 6; ++attempt) {
        MpfrSeriesResult hp = mpfr_ml_series(p.alpha, p.beta, z.real(), z.imag(), bits, kSeriesTermCap);
        if (!hp.converged) {
            throw NonConvergence("Mittag-Leffler extended-precision series hit the term cap");
        }
        const complex value(hp.re, hp.im);
        mod = std::abs(value);
        cond = mod > 0.0 ? hp.abs_sum / mod : std::numeric_limits<double>::infinity();
        const double needed = 64.0 + std::log2(std::max(cond, 1.0));
        if (std::isfinite(cond) && needed <= static_cast<double>(bits) - 8.0) return value;
        bits = static_cast<long>(needed) + 40;
    }
    throw NonConvergence("Mittag-Leffler series cancellation could not be resolved");
}

struct AsymptoticOutcome {
    complex value;
    bool accepted;
};

// E_{a,b}(z) ~ (1/a) sum_k Z_k^(1-b) exp(Z_k) - sum_{j>=1} z^-j / Gamma(b - a j),
// Z_k = |z|^(1/a) exp(i (arg z + 2 pi k) / a) over the k with -a pi < arg z + 2 pi k <= a pi.
inline AsymptoticOutcome ml_asymptotic(const MLParams& p, complex z) {
    const double a = p.alpha;
    const double b = p.beta;
    const double r = std::abs(z);
    const double theta = std::arg(z);
    const double log_r = std::log(r);
    const double scaled = std::exp(log_r / a);  // |Z_k|

    complex exp_part(0.0, 0.0);
    const int k_lo = static_cast<int>(std::ceil((-a * kPi - theta) / (2.0 * kPi)));
    const int k_hi = static_cast<int>(std::floor((a * kPi - theta) / (2.0 * kPi)));
    for (int k = k_lo; k <= k_hi; ++k) {
        const double ang = theta + 2.0 * kPi * k;
        if (!(ang > -a * kPi && ang <= a * kPi)) continue;
        const double phi = ang / a;
        const complex log_zk(log_r / a, phi);
        // Z^(1-b) exp(Z) = exp((1-b) log Z + Z)
        const complex expo = (1.0 - b) * log_zk + std::polar(scaled, phi);
        exp_part += std::exp(expo) / a;
    }

    CompensatedSum<complex> alg;
    double last_env = std::numeric_limits<double>::infinity();
    double err = std::numeric_limits<double>::infinity();
    for (int j = 1; j < 2000; ++j) {
        const double x = b - a * j;
        // magnitude envelope of z^-j / Gamma(x), ignoring the sin(pi x) zeros
        double env;
        if (x > 0.5) {
            env = std::exp(-j * log_r) * std::abs(reciprocal_gamma(x));
        } else {
            env = std::exp(-j * log_r + log_gamma(1.0 - x)) / kPi;
        }
        const double total = std::abs(exp_part + alg.value());
        if (env > last_env && j > 2) {
            err = last_env;
            break;
        }
        if (env <= 1e-17 * total) {
            err = env;
            break;
        }
        const double rg = reciprocal_gamma(x);
        if (rg != 0.0) alg.add(-std::polar(std::exp(-j * log_r), -j * theta) * rg);
        last_env = env;
    }
    const complex value = exp_part + alg.value();
    const double mod = std::abs(value);
    const double stokes = std::exp(-scaled);  // size of the exponentially small switched terms
    const bool ok = std::isfinite(mod) && mod > 0.0 && err <= 1e-15 * mod && stokes <= 1e-15 * mod;
    return {value, ok};
}

}  // namespace detail

/// Mittag-Leffler function E_{alpha,beta}(z) = sum_{n>=0} z^n / Gamma(alpha n + beta).
/// Real arguments give results with an exactly zero imaginary part.
inline complex mittag_leffler(const MLParams& p, complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("mittag_leffler: non-finite argument");
    }
    const bool real_z = z.imag() == 0.0;
    auto finish = [&](complex v) { return real_z ? complex(v.real(), 0.0) : v; };

    if (z == complex(0.0, 0.0)) return complex(reciprocal_gamma(p.beta), 0.0);

    const double r = std::abs(z);
    const double scaled = std::exp(std::log(r) / p.alpha);
    if (p.alpha < 2.0 && scaled >= detail::kAsymptoticMinScaled) {
        const auto asym = detail::ml_asymptotic(p, z);
        if (asym.accepted) return finish(asym.value);
    }
    if (r <= detail::kSeriesRadius || scaled <= detail::kSeriesScaledRadius) {
        return finish(detail::ml_series(p, z));
    }
    throw EvaluationRegionExceeded("mittag_leffler: |z| = " + std::to_string(r) +
                                   " is outside the supported region for alpha = " + std::to_string(p.alpha));
}

inline double mittag_leffler(const MLParams& p, double x) { return mittag_leffler(p, complex(x, 0.0)).real(); }

/// P_alpha(t; -lambda) = t^(alpha-1) E_{alpha,alpha}(lambda t^alpha), the fundamental solution of
/// the Riemann-Liouville linear problem. Singular at t = 0 unless alpha = 1.
inline complex p_alpha(double t, FracOrder alpha, complex lambda) {
    alpha.require_at_most_one("p_alpha");
    const double a = alpha.value();
    if (t < 0.0 || std::isnan(t)) throw DomainError("p_alpha: t must be >= 0");
    if (t == 0.0) {
        if (!alpha.is_one()) throw DomainError("p_alpha: singular at t = 0 for alpha < 1");
        return {1.0, 0.0};
    }
    const MLParams p(a, a);
    const double ta = std::pow(t, a);
    return std::pow(t, a - 1.0) * mittag_leffler(p, lambda * ta);
}

}  // namespace fraccalc
