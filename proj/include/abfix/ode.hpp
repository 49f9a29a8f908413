#pragma once

// u'(s) = f(s, u(s)), u(s0) = r0, solved as the fixed point of
//     (Pu)(s) = r0 + int_{s0}^{s} f(t, u(t)) dt
// on [s0 - h, s0 + h]. P contracts by Lambda * h in the sup metric.

#include "abfix/error.hpp"
#include "abfix/grid.hpp"
#include "abfix/iterate.hpp"
#include "abfix/metric.hpp"
#include "abfix/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace abfix {

using Rhs = std::function<double(double s, double u)>;

struct OdeProblem {
    Rhs rhs;
    double s0 = 0.0;
    double r0 = 0.0;
    double h = 0.5;  // half-width
    std::optional<double> claimed_lipschitz;
};

namespace ode {

/// Margin used when suggesting the largest admissible half-width.
inline constexpr double h_margin = 0.05;

inline void require_valid(const OdeProblem& p) {
    if (!p.rhs) throw DomainError("ode problem has no rhs");
    if (!(p.h > 0.0) || !std::isfinite(p.h)) throw DomainError("half-width h must be > 0");
    if (!std::isfinite(p.s0) || !std::isfinite(p.r0)) throw DomainError("s0 and r0 must be finite");
    if (p.claimed_lipschitz && !(*p.claimed_lipschitz > 0.0))
        throw ContractError("claimed Lipschitz constant must be > 0");
}

/// Symmetric grid over [s0 - h, s0 + h] with s0 at index nodes_per_side.
inline UniformGrid make_grid(const OdeProblem& p, std::size_t nodes_per_side) {
    if (nodes_per_side < 1) throw DomainError("nodes_per_side must be >= 1");
    return UniformGrid(p.s0 - p.h, p.s0 + p.h, 2 * nodes_per_side);
}

inline double checked_rhs(const OdeProblem& p, double s, double u) {
    const double v = p.rhs(s, u);
    if (!std::isfinite(v))
        throw EvaluationError("rhs is not finite at (s, u) = (" + describe(s) + ", " + describe(u) + ")");
    return v;
}

/// r0 plus the signed cumulative trapezoid integral of f(t, u(t)) from s0.
inline GridFunction picard_step(const OdeProblem& p, const GridFunction& u) {
    const auto& grid = u.grid();
    if (grid.intervals() % 2 != 0)
        throw DomainError("ode grid must have an even number of intervals with s0 at the centre");
    const std::size_t c = grid.intervals() / 2;
    const double dx = grid.spacing();
    auto node = [&](std::size_t i) { return i == c ? p.s0 : grid.node(i); };

    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = checked_rhs(p, node(i), u[i]);

    std::vector<double> out(u.size());
    out[c] = p.r0;
    double acc = 0.0;
    for (std::size_t i = c + 1; i < out.size(); ++i) {
        acc += 0.5 * dx * (f[i - 1] + f[i]);
        out[i] = p.r0 + acc;
    }
    acc = 0.0;
    for (std::size_t i = c; i-- > 0;) {
        acc -= 0.5 * dx * (f[i] + f[i + 1]);
        out[i] = p.r0 + acc;
    }
    return GridFunction(grid, std::move(out));
}

/// Lambda * h; a contraction when < 1.
inline double contraction_factor(const OdeProblem& p, double lipschitz) {
    if (!(lipschitz > 0.0)) throw ContractError("Lipschitz constant must be > 0");
    return lipschitz * p.h;
}

/// Largest h with Lambda * h = 1 - margin.
inline double max_admissible_h(double lipschitz) { return (1.0 - h_margin) / lipschitz; }

/// Default tube: u in r0 +- 10 * sup |f(s, r0)| over a coarse grid, or r0 +- 1
/// when f vanishes there.
inline double default_tube_radius(const OdeProblem& p, std::size_t intervals = 64) {
    const UniformGrid g(p.s0 - p.h, p.s0 + p.h, intervals);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        sup = std::max(sup, std::abs(checked_rhs(p, g.node(i), p.r0)));
    return sup > 0.0 ? 10.0 * sup : 1.0;
}

/// max over sampled (s, u) of |f(s, u + d) - f(s, u - d)| / (2 d).
inline double estimate_lipschitz(const OdeProblem& p, std::uint64_t seed, std::size_t n_samples,
                                 std::optional<double> tube_radius = std::nullopt) {
    require_valid(p);
    if (n_samples < 1) throw DomainError("n_samples must be >= 1");
    const double r = tube_radius ? *tube_radius : default_tube_radius(p);
    if (!(r > 0.0)) throw DomainError("tube radius must be > 0");
    Rng rng(seed);
    double lip = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double s = uniform(rng, p.s0 - p.h, p.s0 + p.h);
        const double u = uniform(rng, p.r0 - r, p.r0 + r);
        const double d = 1e-6 * std::max(1.0, std::abs(u));
        const double diff = checked_rhs(p, s, u + d) - checked_rhs(p, s, u - d);
        lip = std::max(lip, std::abs(diff) / (2.0 * d));
    }
    return lip;
}

struct SolveOptions {
    std::size_t nodes_per_side = 500;
    StoppingRule stop{};
    bool strict = false;
    std::uint64_t seed = 0;
    std::size_t lipschitz_samples = 20000;
    std::optional<double> tube_radius;
};

struct SolveReport {
    FixedPointResult<GridFunction> result;
    double lipschitz = 0.0;
    bool lipschitz_estimated = false;
    double factor = 0.0;  // Lambda * h
    std::vector<std::string> warnings;
};

inline SolveReport solve_ivp(const OdeProblem& p, const SolveOptions& opt = {}) {
    require_valid(p);
    const UniformGrid grid = make_grid(p, opt.nodes_per_side);

    const bool estimated = !p.claimed_lipschitz;
    const double lip = estimated ? estimate_lipschitz(p, opt.seed, opt.lipschitz_samples, opt.tube_radius)
                                 : *p.claimed_lipschitz;
    const double factor = lip * p.h;

    std::vector<std::string> warnings;
    std::optional<double> rate;
    if (factor < 1.0) {
        rate = factor;
    } else {
        const std::string msg = "Lambda*h = " + describe(factor) +
                                " >= 1: contraction not established; largest admissible h is " +
                                describe(max_admissible_h(lip));
        if (opt.strict) throw PreconditionError(msg, factor);
        warnings.push_back(msg + "; iterating best-effort");
    }

    const auto space = sup_grid_space(grid);
    const SelfMap<GridFunction> op = [&](const GridFunction& u) { return picard_step(p, u); };
    auto result = picard_with_rate(op, space, GridFunction::constant(grid, p.r0), rate, opt.stop);
    throw_if_diverging(result, "ode picard iteration");
    if (has_negative(result.fixed_point))
        warnings.emplace_back("solution takes negative values (codomain R+ not enforced)");
    return {std::move(result), lip, estimated, factor, std::move(warnings)};
}

} // namespace ode
} // namespace abfix
