#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include <mpfr.h>

namespace fraccalc::detail {

/// RAII holder for an mpfr_t.
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;

    mpfr_ptr get() noexcept { return v_; }
    operator mpfr_ptr() noexcept { return v_; }

private:
    mpfr_t v_;
};

struct MpfrSeriesResult {
    double re = 0.0;
    double im = 0.0;
    double abs_sum = 0.0;
    bool converged = false;
};

/// sum_{n>=0} z^n / Gamma(alpha n + beta) carried out at `bits` of precision.
inline MpfrSeriesResult mpfr_ml_series(double alpha, double beta, double z_re, double z_im, long bits,
                                       std::size_t term_cap) {
    const auto prec = static_cast<mpfr_prec_t>(bits);
    const bool real_z = z_im == 0.0;
    Mpfr zr(prec), zi(prec), pr(prec), pi(prec), sr(prec), si(prec);
    Mpfr g(prec), tr(prec), ti(prec), tmp(prec), tmp2(prec);
    mpfr_set_d(zr, z_re, MPFR_RNDN);
    mpfr_set_d(zi, z_im, MPFR_RNDN);
    mpfr_set_ui(pr, 1, MPFR_RNDN);
    mpfr_set_ui(pi, 0, MPFR_RNDN);
    mpfr_set_ui(sr, 0, MPFR_RNDN);
    mpfr_set_ui(si, 0, MPFR_RNDN);

    MpfrSeriesResult out;
    double prev_mag = std::numeric_limits<double>::infinity();
    int small_run = 0;
    for (std::size_t n = 0; n <= term_cap; ++n) {
        // g = Gamma(alpha * n + beta)
        mpfr_set_d(g, alpha, MPFR_RNDN);
        mpfr_mul_ui(g, g, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_add_d(g, g, beta, MPFR_RNDN);
        mpfr_gamma(g, g, MPFR_RNDN);

        mpfr_div(tr, pr, g, MPFR_RNDN);
        mpfr_add(sr, sr, tr, MPFR_RNDN);
        double mag;
        if (real_z) {
            mag = std::abs(mpfr_get_d(tr, MPFR_RNDN));
        } else {
            mpfr_div(ti, pi, g, MPFR_RNDN);
            mpfr_add(si, si, ti, MPFR_RNDN);
            mag = std::hypot(mpfr_get_d(tr, MPFR_RNDN), mpfr_get_d(ti, MPFR_RNDN));
        }
        out.abs_sum += mag;

        const double cur = std::hypot(mpfr_get_d(sr, MPFR_RNDN), real_z ? 0.0 : mpfr_get_d(si, MPFR_RNDN));
        if (n > 0 && mag < prev_mag && mag <= 1e-17 * cur) {
            if (++small_run >= 10) {
                out.re = mpfr_get_d(sr, MPFR_RNDN);
                out.im = real_z ? 0.0 : mpfr_get_d(si, MPFR_RNDN);
                out.converged = true;
                return out;
            }
        } else {
            small_run = 0;
        }
        prev_mag = mag;

        // p *= z
        if (real_z) {
            mpfr_mul(pr, pr, zr, MPFR_RNDN);
        } else {
            mpfr_mul(tmp, pr, zr, MPFR_RNDN);
            mpfr_mul(tmp2, pi, zi, MPFR_RNDN);
            mpfr_sub(tmp, tmp, tmp2, MPFR_RNDN);
            mpfr_mul(tmp2, pr, zi, MPFR_RNDN);
            mpfr_mul(pi, pi, zr, MPFR_RNDN);
            mpfr_add(pi, pi, tmp2, MPFR_RNDN);
            mpfr_set(pr.get(), tmp.get(), MPFR_RNDN);
        }
    }
    return out;
}

}  // namespace fraccalc::detail
