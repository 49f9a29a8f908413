#pragma once

// Second-kind Fredholm equations u(s) = int_m^n F(s, t, u(t)) dt, discretized
// on a uniform grid (Nystrom) and solved by Picard iteration in the sup metric.
// With |F(s,t,u) - F(s,t,v)| <= Lambda |u - v| the discrete operator contracts
// by Lambda * (n - m), since the quadrature weights sum to n - m.

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

using Kernel = std::function<double(double s, double t, double u)>;

struct FredholmProblem {
    Kernel kernel;
    double lower = 0.0;
    double upper = 1.0;
    std::optional<double> claimed_lipschitz;
};

namespace fredholm {

inline void require_valid(const FredholmProblem& p) {
    if (!p.kernel) throw DomainError("fredholm problem has no kernel");
    if (!(p.lower < p.upper) || !std::isfinite(p.lower) || !std::isfinite(p.upper))
        throw DomainError("fredholm interval requires finite m < n");
    if (p.claimed_lipschitz && !(*p.claimed_lipschitz > 0.0))
        throw ContractError("claimed Lipschitz constant must be > 0");
}

inline double checked_kernel(const FredholmProblem& p, double s, double t, double u) {
    const double v = p.kernel(s, t, u);
    if (!std::isfinite(v))
        throw EvaluationError("kernel is not finite at (s, t) = (" + describe(s) + ", " + describe(t) +
                              ") with u = " + describe(u));
    return v;
}

/// (Pu)(s_i) = sum_j w_j F(s_i, t_j, u(t_j)).
inline GridFunction apply_operator(const FredholmProblem& p, const GridFunction& u,
                                   const QuadratureRule& quad) {
    if (quad.weights.size() != u.size())
        throw DomainError("quadrature has " + std::to_string(quad.weights.size()) +
                          " weights for " + std::to_string(u.size()) + " nodes");
    const auto& grid = u.grid();
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = grid.node(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j)
            acc += quad.weights[j] * checked_kernel(p, s, grid.node(j), u[j]);
        out[i] = acc;
    }
    return GridFunction(grid, std::move(out));
}

/// Default u-range half-width for Lipschitz sampling: 10 * sup |F(s,t,0)|
/// over a coarse grid, or 1 when the kernel vanishes at u = 0.
inline double default_tube_radius(const FredholmProblem& p, std::size_t intervals = 64) {
    const UniformGrid g(p.lower, p.upper, intervals);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            sup = std::max(sup, std::abs(checked_kernel(p, g.node(i), g.node(j), 0.0)));
    return sup > 0.0 ? 10.0 * sup : 1.0;
}

/// sup over sampled (s, t, u != v) of |F(s,t,u) - F(s,t,v)| / |u - v|.
inline double estimate_kernel_lipschitz(const FredholmProblem& p, std::uint64_t seed,
                                        std::size_t n_samples,
                                        std::optional<double> tube_radius = std::nullopt) {
    require_valid(p);
    if (n_samples < 1) throw DomainError("n_samples must be >= 1");
    const double r = tube_radius ? *tube_radius : default_tube_radius(p);
    if (!(r > 0.0)) throw DomainError("tube radius must be > 0");
    Rng rng(seed);
    double lip = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double s = uniform(rng, p.lower, p.upper);
        const double t = uniform(rng, p.lower, p.upper);
        const double u = uniform(rng, -r, r);
        const double v = uniform(rng, -r, r);
        if (u == v) continue;
        const double diff = checked_kernel(p, s, t, u) - checked_kernel(p, s, t, v);
        lip = std::max(lip, std::abs(diff) / std::abs(u - v));
    }
    return lip;
}

/// Lambda * (n - m); a contraction when < 1.
inline double contraction_factor(const FredholmProblem& p, double lipschitz) {
    if (!(lipschitz > 0.0)) throw ContractError("Lipschitz constant must be > 0");
    return lipschitz * (p.upper - p.lower);
}

struct SolveOptions {
    std::size_t intervals = 1000;  // M; the grid has M + 1 nodes
    QuadratureKind quadrature = QuadratureKind::trapezoid;
    StoppingRule stop{};
    bool strict = false;           // refuse when Lambda (n - m) >= 1
    std::optional<GridFunction> initial;  // zero grid function when empty
    std::uint64_t seed = 0;
    std::size_t lipschitz_samples = 20000;
    std::optional<double> tube_radius;
};

struct GridSolveReport {
    FixedPointResult<GridFunction> result;
    double lipschitz = 0.0;
    bool lipschitz_estimated = false;
    double factor = 0.0;           // Lambda * (n - m)
    std::vector<std::string> warnings;
};

inline GridSolveReport solve(const FredholmProblem& p, const SolveOptions& opt = {}) {
    require_valid(p);
    const UniformGrid grid(p.lower, p.upper, opt.intervals);
    const QuadratureRule quad = make_quadrature(opt.quadrature, grid);

    const bool estimated = !p.claimed_lipschitz;
    const double lip = estimated
                           ? estimate_kernel_lipschitz(p, opt.seed, opt.lipschitz_samples, opt.tube_radius)
                           : *p.claimed_lipschitz;
    const double factor = lip * (p.upper - p.lower);

    std::vector<std::string> warnings;
    std::optional<double> rate;
    if (factor < 1.0) {
        rate = factor;
    } else {
        const std::string msg =
            "Lambda*(n-m) = " + describe(factor) + " >= 1: contraction not established";
        if (opt.strict) throw PreconditionError(msg, factor);
        warnings.push_back(msg + "; iterating best-effort");
    }

    const auto space = sup_grid_space(grid);
    const SelfMap<GridFunction> op = [&](const GridFunction& u) { return apply_operator(p, u, quad); };
    const GridFunction x0 = opt.initial ? *opt.initial : GridFunction::constant(grid, 0.0);
    auto result = picard_with_rate(op, space, x0, rate, opt.stop);
    throw_if_diverging(result, "fredholm iteration");
    if (has_negative(result.fixed_point))
        warnings.emplace_back("solution takes negative values (codomain R+ not enforced)");
    return {std::move(result), lip, estimated, factor, std::move(warnings)};
}

} // namespace fredholm
} // namespace abfix
