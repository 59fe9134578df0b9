#pragma once

// Stability of linear Caputo systems dC u = A u: the Matignon sector test |arg lambda| > alpha pi / 2
// on every eigenvalue of A, region sampling, and an empirical Mittag-Leffler decay probe.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fraccalc/error.hpp"
#include "fraccalc/path.hpp"
#include "fraccalc/specialfn.hpp"
#include "fraccalc/types.hpp"

namespace fraccalc {

enum class Verdict { Stable, Marginal, Unstable };

inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Marginal: return "marginal";
        case Verdict::Unstable: return "unstable";
    }
    return "?";
}

inline constexpr double kSectorTolerance = 1e-12;

/// Sector test for alpha in (0, 2). lambda = 0 is Marginal.
inline Verdict matignon_check(FracOrder alpha, complex lambda) {
    const double a = alpha.value();
    if (!(a < 2.0)) throw DomainError("matignon_check: alpha must lie in (0, 2)");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
        throw DomainError("matignon_check: non-finite eigenvalue");
    }
    if (lambda == complex(0.0, 0.0)) return Verdict::Marginal;
    const double margin = std::abs(std::arg(lambda)) - a * detail::kPi / 2.0;
    if (margin > kSectorTolerance) return Verdict::Stable;
    if (margin < -kSectorTolerance) return Verdict::Unstable;
    return Verdict::Marginal;
}

struct SpectrumReport {
    std::vector<complex> eigenvalues;
    std::vector<Verdict> verdicts;
    Verdict system = Verdict::Stable;
};

namespace detail {

inline std::vector<complex> small_eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() == 1) return {complex(a(0, 0), 0.0)};
    // 2x2: roots of x^2 - tr x + det, using the cancellation-free quadratic formula
    const double tr = a(0, 0) + a(1, 1);
    const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
    const double disc = half_diff * half_diff + a(0, 1) * a(1, 0);
    const double mid = 0.5 * tr;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        const double big = mid + std::copysign(r, mid);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double other = big != 0.0 ? det / big : mid - r;
        return {complex(big, 0.0), complex(other, 0.0)};
    }
    const double r = std::sqrt(-disc);
    return {complex(mid, r), complex(mid, -r)};
}

inline Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

}  // namespace detail

/// Eigenvalues of A (closed form for d <= 2, Hessenberg-QR otherwise) and their sector verdicts.
inline SpectrumReport classify_system(FracOrder alpha, const Eigen::MatrixXd& a,
                                      DerivativeKind kind = DerivativeKind::Caputo) {
    if (kind == DerivativeKind::RiemannLiouville) {
        throw ModelRestriction(
            "classify_system: only the Caputo (Matignon) criterion is implemented; no stability test is offered "
            "for Riemann-Liouville systems");
    }
    if (a.rows() != a.cols() || a.rows() == 0) throw DomainError("classify_system: A must be square and non-empty");
    if (a.rows() > 8) throw DomainError("classify_system: dimension is capped at 8");
    if (!a.allFinite()) throw DomainError("classify_system: non-finite matrix entry");

    SpectrumReport report;
    if (a.rows() <= 2) {
        report.eigenvalues = detail::small_eigenvalues(a);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
        if (es.info() != Eigen::Success) throw EigenConvergenceFailure("classify_system: QR iteration did not converge");
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) report.eigenvalues.push_back(ev[i]);
    }
    for (const complex& l : report.eigenvalues) {
        const Verdict v = matignon_check(alpha, l);
        report.verdicts.push_back(v);
        report.system = detail::worst(report.system, v);
    }
    return report;
}

inline SpectrumReport classify_system(FracOrder alpha, const std::vector<std::vector<double>>& rows,
                                      DerivativeKind kind = DerivativeKind::Caputo) {
    const auto d = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d) {
            throw DomainError("classify_system: matrix rows must all have length " + std::to_string(d));
        }
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return classify_system(alpha, a, kind);
}

/// Aggregates verdicts for a spectrum given directly.
inline SpectrumReport classify_spectrum(FracOrder alpha, const std::vector<complex>& eigenvalues) {
    SpectrumReport report;
    report.eigenvalues = eigenvalues;
    for (const complex& l : eigenvalues) {
        const Verdict v = matignon_check(alpha, l);
        report.verdicts.push_back(v);
        report.system = detail::worst(report.system, v);
    }
    return report;
}

/// `count` equispaced samples from lo to hi inclusive (a single sample sits at lo).
struct AxisRange {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t count = 11;

    [[nodiscard]] double at(std::size_t i) const {
        if (count == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

struct RegionSample {
    double re;
    double im;
    bool stable;
};

/// Row-major (imaginary part outer) sampling of { lambda : matignon_check == Stable }.
inline std::vector<RegionSample> stability_region_sample(FracOrder alpha, const AxisRange& re, const AxisRange& im) {
    if (re.count == 0 || im.count == 0) throw DomainError("stability_region_sample: empty axis");
    if (!std::isfinite(re.lo) || !std::isfinite(re.hi) || !std::isfinite(im.lo) || !std::isfinite(im.hi)) {
        throw DomainError("stability_region_sample: non-finite range");
    }
    std::vector<RegionSample> out;
    out.reserve(re.count * im.count);
    for (std::size_t j = 0; j < im.count; ++j) {
        for (std::size_t i = 0; i < re.count; ++i) {
            const complex l(re.at(i), im.at(j));
            out.push_back({l.real(), l.imag(), matignon_check(alpha, l) == Verdict::Stable});
        }
    }
    return out;
}

enum class Trend { Decays, Grows };

inline const char* to_string(Trend t) noexcept { return t == Trend::Decays ? "decays" : "grows"; }

struct DecayProbe {
    Trend trend = Trend::Decays;
    double t_achieved = 0.0;  ///< last time at which E_alpha could be evaluated
    bool truncated = false;   ///< the evaluation region ended before t_max
};

/// Samples |E_alpha(lambda t^alpha)| on a log grid over [t_max 1e-4, t_max] and compares the
/// largest value on the last tenth of the grid with the largest on the 60-70% stretch.
inline DecayProbe ml_decay_probe(FracOrder alpha, complex lambda, double t_max, std::size_t samples = 400) {
    const double a = alpha.value();
    if (!(a < 2.0)) throw DomainError("ml_decay_probe: alpha must lie in (0, 2)");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("ml_decay_probe: t_max must be finite and > 0");
    if (samples < 50) throw DomainError("ml_decay_probe: need at least 50 samples");

    const MLParams mp(a, 1.0);
    const double log_lo = std::log(t_max * 1e-4);
    const double log_hi = std::log(t_max);
    std::vector<double> mag;
    DecayProbe probe;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(samples - 1));
        try {
            mag.push_back(std::abs(mittag_leffler(mp, lambda * std::pow(t, a))));
        } catch (const EvaluationRegionExceeded&) {
            probe.truncated = true;
            break;
        }
        probe.t_achieved = t;
    }
    if (mag.size() < samples / 2) {
        throw EvaluationRegionExceeded("ml_decay_probe: Mittag-Leffler evaluation region ends at t = " +
                                       std::to_string(probe.t_achieved));
    }
    const std::size_t m = mag.size();
    const auto seg_max = [&](double f0, double f1) {
        const auto i0 = static_cast<std::size_t>(f0 * static_cast<double>(m));
        const auto i1 = std::max(i0 + 1, static_cast<std::size_t>(f1 * static_cast<double>(m)));
        return *std::max_element(mag.begin() + static_cast<std::ptrdiff_t>(i0),
                                 mag.begin() + static_cast<std::ptrdiff_t>(std::min(i1, m)));
    };
    probe.trend = seg_max(0.9, 1.0) < seg_max(0.6, 0.7) ? Trend::Decays : Trend::Grows;
    return probe;
}

}  // namespace fraccalc
