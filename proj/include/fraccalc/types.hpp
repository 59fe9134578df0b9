#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fraccalc/error.hpp"

namespace fraccalc {

/// Order of a fractional operator. Always finite and strictly positive; solvers narrow the
/// range further through the require_* checks.
class FracOrder {
public:
    explicit FracOrder(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw DomainError("fractional order must be finite and > 0, got " + std::to_string(value));
        }
    }

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] bool is_one() const noexcept { return value_ == 1.0; }

    /// alpha in (0, 1]
    void require_at_most_one(const char* where) const {
        if (value_ > 1.0) {
            throw DomainError(std::string(where) + ": order must lie in (0, 1], got " + std::to_string(value_));
        }
    }

    /// alpha in (0, 1)
    void require_below_one(const char* where) const {
        if (value_ >= 1.0) {
            throw DomainError(std::string(where) + ": order must lie in (0, 1), got " + std::to_string(value_));
        }
    }

    friend bool operator==(FracOrder a, FracOrder b) noexcept { return a.value_ == b.value_; }

private:
    double value_;
};

/// Uniform mesh t_k = k * tau, k = 0..n_steps.
class UniformGrid {
public:
    UniformGrid(double tau, std::size_t n_steps) : tau_(tau), n_steps_(n_steps) {
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw DomainError("grid step must be finite and > 0");
        }
        if (n_steps < 1) {
            throw DomainError("grid needs at least one step");
        }
    }

    /// Grid covering [0, horizon] with step tau; horizon/tau must be an integer up to 1e-9 relative.
    static UniformGrid from_horizon(double horizon, double tau) {
        if (!(horizon > 0.0) || !(tau > 0.0)) {
            throw DomainError("horizon and step must be > 0");
        }
        const double steps = std::round(horizon / tau);
        if (steps < 1.0 || std::abs(steps * tau - horizon) > 1e-9 * horizon) {
            throw DomainError("horizon is not an integer multiple of the step");
        }
        return UniformGrid(tau, static_cast<std::size_t>(steps));
    }

    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_steps_ + 1; }
    [[nodiscard]] double node(std::size_t k) const noexcept { return static_cast<double>(k) * tau_; }
    [[nodiscard]] double horizon() const noexcept { return node(n_steps_); }

    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> t(size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = node(k);
        return t;
    }

    friend bool operator==(const UniformGrid& a, const UniformGrid& b) noexcept {
        return a.tau_ == b.tau_ && a.n_steps_ == b.n_steps_;
    }

private:
    double tau_;
    std::size_t n_steps_;
};

/// Samples f(t_k) on a uniform grid. Entries are finite, except that node 0 may hold NaN when
/// singular_origin is set (derivatives that blow up or are undefined at t = 0).
class SampledFunction {
public:
    SampledFunction(UniformGrid grid, std::vector<double> values, bool singular_origin = false)
        : grid_(grid), values_(std::move(values)), singular_origin_(singular_origin) {
        if (values_.size() != grid_.size()) {
            throw DomainError("sample count " + std::to_string(values_.size()) + " does not match grid node count " +
                              std::to_string(grid_.size()));
        }
        for (std::size_t k = singular_origin_ ? 1 : 0; k < values_.size(); ++k) {
            if (!std::isfinite(values_[k])) {
                throw DomainError("non-finite sample at node " + std::to_string(k));
            }
        }
    }

    template <typename F>
    static SampledFunction sample(const UniformGrid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.node(k));
        return SampledFunction(grid, std::move(v));
    }

    [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool singular_origin() const noexcept { return singular_origin_; }

    void require_finite_origin(const char* where) const {
        if (singular_origin_) {
            throw DomainError(std::string(where) + ": input has no value at t = 0");
        }
    }

private:
    UniformGrid grid_;
    std::vector<double> values_;
    bool singular_origin_;
};

}  // namespace fraccalc
