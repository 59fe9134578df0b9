#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraccalc/types.hpp"

namespace fraccalc {

enum class DerivativeKind { Caputo, RiemannLiouville };

inline const char* to_string(DerivativeKind k) noexcept {
    return k == DerivativeKind::Caputo ? "caputo" : "rl";
}

struct PathMeta {
    std::string method;
    double alpha = 1.0;
    DerivativeKind kind = DerivativeKind::Caputo;
    bool singular_origin = false;  ///< node 0 holds NaN (Riemann-Liouville blow-up)
    bool overflow = false;         ///< integration stopped after |U| exceeded the divergence bound
    std::optional<std::size_t> overflow_step;
    std::optional<std::uint64_t> seed;
};

/// Grid-aligned, possibly vector-valued solution samples.
class SolutionPath {
public:
    SolutionPath(UniformGrid grid, std::size_t dim, PathMeta meta)
        : grid_(grid), dim_(dim), meta_(std::move(meta)), data_(grid.size() * dim, 0.0) {
        if (dim == 0) throw DomainError("solution dimension must be >= 1");
    }

    [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const PathMeta& meta() const noexcept { return meta_; }
    [[nodiscard]] PathMeta& meta() noexcept { return meta_; }

    [[nodiscard]] std::span<double> state(std::size_t n) { return {data_.data() + n * dim_, dim_}; }
    [[nodiscard]] std::span<const double> state(std::size_t n) const { return {data_.data() + n * dim_, dim_}; }

    [[nodiscard]] double value(std::size_t n, std::size_t i = 0) const { return data_[n * dim_ + i]; }
    void set(std::size_t n, std::size_t i, double v) { data_[n * dim_ + i] = v; }

    [[nodiscard]] std::vector<double> component(std::size_t i) const {
        std::vector<double> out(size());
        for (std::size_t n = 0; n < out.size(); ++n) out[n] = value(n, i);
        return out;
    }

    /// Mark node 0 as the Riemann-Liouville singularity.
    void mark_singular_origin() {
        meta_.singular_origin = true;
        for (std::size_t i = 0; i < dim_; ++i) set(0, i, std::numeric_limits<double>::quiet_NaN());
    }

private:
    UniformGrid grid_;
    std::size_t dim_;
    PathMeta meta_;
    std::vector<double> data_;
};

}  // namespace fraccalc
