#pragma once

#include "abfix/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abfix {

/// Uniform nodes lower = t_0 < ... < t_M = upper.
class UniformGrid {
public:
    UniformGrid(double lower, double upper, std::size_t intervals)
        : lower_(lower), upper_(upper), intervals_(intervals) {
        if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
            throw DomainError("grid requires finite lower < upper");
        if (intervals < 1)
            throw DomainError("grid requires at least 2 nodes");
    }

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    std::size_t intervals() const noexcept { return intervals_; }
    std::size_t size() const noexcept { return intervals_ + 1; }
    double spacing() const noexcept { return (upper_ - lower_) / static_cast<double>(intervals_); }

    // Computed from both ends so the last node is exactly `upper`.
    double node(std::size_t i) const noexcept {
        const double frac = static_cast<double>(i) / static_cast<double>(intervals_);
        return lower_ * (1.0 - frac) + upper_ * frac;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
        return out;
    }

    bool operator==(const UniformGrid&) const = default;

private:
    double lower_;
    double upper_;
    std::size_t intervals_;
};

/// Real function sampled on a uniform grid.
class GridFunction {
public:
    GridFunction(UniformGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw DomainError("grid function has " + std::to_string(values_.size()) +
                              " values for " + std::to_string(grid_.size()) + " nodes");
    }

    static GridFunction constant(UniformGrid grid, double value) {
        return GridFunction(grid, std::vector<double>(grid.size(), value));
    }

    template <class F>
    static GridFunction sample(UniformGrid grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    const UniformGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    bool operator==(const GridFunction&) const = default;

private:
    UniformGrid grid_;
    std::vector<double> values_;
};

inline bool has_negative(const GridFunction& u) {
    const auto v = u.values();
    return std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
}

/// max_i |u(t_i) - v(t_i)|; both functions must share a grid.
inline double sup_distance(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid() == v.grid()))
        throw DomainError("sup distance between functions on different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    return d;
}

enum class QuadratureKind { trapezoid, simpson };

inline std::string_view to_string(QuadratureKind k) {
    return k == QuadratureKind::trapezoid ? "trapezoid" : "simpson";
}

/// Composite rule on a UniformGrid; weights sum to (upper - lower).
struct QuadratureRule {
    QuadratureKind kind;
    std::vector<double> weights;
};

inline QuadratureRule make_quadrature(QuadratureKind kind, const UniformGrid& grid) {
    const std::size_t n = grid.size();
    const double dx = grid.spacing();
    std::vector<double> w(n);
    if (kind == QuadratureKind::trapezoid) {
        std::fill(w.begin(), w.end(), dx);
        w.front() = w.back() = 0.5 * dx;
    } else {
        if (grid.intervals() % 2 != 0)
            throw DomainError("Simpson rule needs an even number of intervals, got " +
                              std::to_string(grid.intervals()));
        for (std::size_t i = 0; i < n; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * dx / 3.0;
        w.front() = w.back() = dx / 3.0;
    }
    return {kind, std::move(w)};
}

inline double weight_sum(const QuadratureRule& q) {
    return std::accumulate(q.weights.begin(), q.weights.end(), 0.0);
}

} // namespace abfix
