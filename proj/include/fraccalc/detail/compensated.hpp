#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace fraccalc::detail {

/// Neumaier (improved Kahan) running sum. Works for double and std::complex<double>
/// because the compensation is applied component-wise.
template <typename T>
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(T init) : sum_(init) {}

    void add(T x) noexcept {
        if constexpr (std::is_floating_point_v<T>) {
            add_real(sum_, comp_, x);
        } else {
            double s_re = sum_.real(), c_re = comp_.real();
            double s_im = sum_.imag(), c_im = comp_.imag();
            add_real(s_re, c_re, x.real());
            add_real(s_im, c_im, x.imag());
            sum_ = T(s_re, s_im);
            comp_ = T(c_re, c_im);
        }
    }

    CompensatedSum& operator+=(T x) noexcept {
        add(x);
        return *this;
    }

    /// Merge another partial sum (used for order-fixed parallel reductions).
    void merge(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
    }

    [[nodiscard]] T value() const noexcept { return sum_ + comp_; }

private:
    static void add_real(double& sum, double& comp, double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    T sum_{};
    T comp_{};
};

}  // namespace fraccalc::detail
