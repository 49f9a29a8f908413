#pragma once

// (alpha,beta)-metric spaces: a distance G with G(x,y) <= alpha*G(x,z) + beta*G(z,y).
// Axioms are certified on sampled triples, never proven.

#include "abfix/error.hpp"
#include "abfix/grid.hpp"
#include "abfix/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abfix {

/// Relative slack on every floating-point axiom comparison.
inline constexpr double eps_axiom = 1e-12;

struct AlphaBetaParams {
    double alpha = 1.0;
    double beta = 1.0;

    bool operator==(const AlphaBetaParams&) const = default;
};

inline void require_valid(const AlphaBetaParams& p) {
    if (!(p.alpha >= 1.0) || !std::isfinite(p.alpha))
        throw ContractError("alpha must be a finite value >= 1");
    if (!(p.beta >= 1.0) || !std::isfinite(p.beta))
        throw ContractError("beta must be a finite value >= 1");
}

inline std::string describe(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string describe(const GridFunction& u) {
    return "grid function on [" + describe(u.grid().lower()) + ", " + describe(u.grid().upper()) +
           "] with " + std::to_string(u.size()) + " nodes";
}

/// Point set descriptor: a seeded sampler, a membership test and, for finite
/// sets, the explicit point list.
template <class Point>
struct Domain {
    std::string kind;
    std::function<Point(Rng&)> sample;
    std::function<bool(const Point&)> contains;
    std::vector<Point> points;
};

inline Domain<double> interval_domain(double lo, double hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("interval [" + describe(lo) + ", " + describe(hi) + "] is empty");
    return {"interval",
            [lo, hi](Rng& rng) { return uniform(rng, lo, hi); },
            [lo, hi](const double& x) { return x >= lo && x <= hi; },
            {}};
}

inline Domain<double> point_domain(std::vector<double> pts) {
    if (pts.empty()) throw DomainError("finite point set is empty");
    auto shared = pts;
    return {"points",
            [shared](Rng& rng) { return shared[uniform_index(rng, shared.size())]; },
            [shared](const double& x) {
                return std::find(shared.begin(), shared.end(), x) != shared.end();
            },
            std::move(pts)};
}

/// Grid functions with node values uniform in [-radius, radius].
inline Domain<GridFunction> grid_function_domain(UniformGrid grid, double radius) {
    if (!(radius > 0.0)) throw DomainError("grid-function sampling radius must be positive");
    return {"grid-functions",
            [grid, radius](Rng& rng) {
                std::vector<double> v(grid.size());
                for (auto& x : v) x = uniform(rng, -radius, radius);
                return GridFunction(grid, std::move(v));
            },
            [grid](const GridFunction& u) { return u.grid() == grid && u.all_finite(); },
            {}};
}

template <class Point>
struct MetricSpace {
    std::string name;
    Domain<Point> domain;
    std::function<double(const Point&, const Point&)> distance;
    AlphaBetaParams params;  // claimed certificate
};

inline MetricSpace<double> abs_space(Domain<double> domain) {
    return {"abs", std::move(domain), [](const double& x, const double& y) { return std::abs(x - y); },
            {1.0, 1.0}};
}

/// |x-y|^2; (a+b)^2 <= 2a^2 + 2b^2 certifies (2,2) globally.
inline MetricSpace<double> abs_squared_space(Domain<double> domain) {
    return {"abs-squared", std::move(domain),
            [](const double& x, const double& y) { return (x - y) * (x - y); }, {2.0, 2.0}};
}

inline MetricSpace<GridFunction> sup_grid_space(UniformGrid grid, double radius = 1.0) {
    return {"sup-grid", grid_function_domain(grid, radius),
            [](const GridFunction& u, const GridFunction& v) { return sup_distance(u, v); },
            {1.0, 1.0}};
}

/// Named scalar spaces ("abs", "abs-squared").
inline MetricSpace<double> named_scalar_space(std::string_view name, Domain<double> domain) {
    if (name == "abs") return abs_space(std::move(domain));
    if (name == "abs-squared") return abs_squared_space(std::move(domain));
    throw DomainError("unknown scalar space '" + std::string(name) + "'");
}

template <class Point>
struct Triple {
    Point x;
    Point y;
    Point z;
};

template <class Point>
std::vector<Triple<Point>> sample_triples(const Domain<Point>& domain, std::uint64_t seed,
                                          std::size_t n) {
    if (!domain.sample) throw DomainError("domain has no sampler");
    Rng rng(seed);
    std::vector<Triple<Point>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point x = domain.sample(rng);
        Point y = domain.sample(rng);
        Point z = domain.sample(rng);
        out.push_back({std::move(x), std::move(y), std::move(z)});
    }
    return out;
}

/// All |points|^3 ordered triples.
template <class Point>
std::vector<Triple<Point>> enumerate_triples(std::span<const Point> points) {
    if (points.empty()) throw DomainError("finite point set is empty");
    std::vector<Triple<Point>> out;
    out.reserve(points.size() * points.size() * points.size());
    for (const auto& x : points)
        for (const auto& y : points)
            for (const auto& z : points) out.push_back({x, y, z});
    return out;
}

namespace detail {

template <class Point>
double checked_distance(const MetricSpace<Point>& space, const Point& a, const Point& b) {
    const double d = space.distance(a, b);
    if (!std::isfinite(d) || d < 0.0)
        throw EvaluationError("distance " + space.name + "(" + describe(a) + ", " + describe(b) +
                              ") = " + describe(d) + " is not a finite nonnegative value");
    return d;
}

inline bool leq_slack(double lhs, double rhs) {
    return lhs <= rhs + eps_axiom * std::max({std::abs(lhs), std::abs(rhs)});
}

template <class Point>
void require_nonempty(std::span<const Triple<Point>> triples) {
    if (triples.empty()) throw DomainError("no triples to check (n_triples must be >= 1)");
}

// Triple distances in the orientation the (alpha,beta) inequality reads them.
struct TripleDistances {
    double xy, xz, zy;
};

template <class Point>
TripleDistances triple_distances(const MetricSpace<Point>& space, const Triple<Point>& t) {
    return {checked_distance(space, t.x, t.y), checked_distance(space, t.x, t.z),
            checked_distance(space, t.z, t.y)};
}

} // namespace detail

enum class Axiom { identity, indiscernibility, symmetry, triangle };

inline std::string_view to_string(Axiom a) {
    switch (a) {
    case Axiom::identity: return "identity";
    case Axiom::indiscernibility: return "indiscernibility";
    case Axiom::symmetry: return "symmetry";
    case Axiom::triangle: return "triangle";
    }
    return "?";
}

template <class Point>
struct Violation {
    Axiom axiom;
    std::vector<Point> witness;
    double lhs;
    double rhs;
};

template <class Point>
struct AxiomReport {
    bool passed = true;
    std::vector<Violation<Point>> violations;
    std::size_t triples_checked = 0;
};

/// Checks identity, indiscernibility of distinct points, symmetry and the
/// (alpha,beta) triangle inequality on every triple. Negative or non-finite
/// distances throw EvaluationError.
template <class Point>
AxiomReport<Point> verify_axioms(const MetricSpace<Point>& space, const AlphaBetaParams& params,
                                 std::span<const Triple<Point>> triples) {
    require_valid(params);
    detail::require_nonempty(triples);
    AxiomReport<Point> report;
    auto flag = [&](Axiom a, std::vector<Point> w, double lhs, double rhs) {
        report.violations.push_back({a, std::move(w), lhs, rhs});
    };
    for (const auto& t : triples) {
        for (const Point* p : {&t.x, &t.y, &t.z}) {
            const double self = detail::checked_distance(space, *p, *p);
            if (self > eps_axiom) flag(Axiom::identity, {*p}, self, 0.0);
        }
        const auto d = detail::triple_distances(space, t);
        const Point* ends[3][2] = {{&t.x, &t.y}, {&t.x, &t.z}, {&t.z, &t.y}};
        const double forward[3] = {d.xy, d.xz, d.zy};
        for (int k = 0; k < 3; ++k) {
            const Point& a = *ends[k][0];
            const Point& b = *ends[k][1];
            const double back = detail::checked_distance(space, b, a);
            if (std::abs(forward[k] - back) >
                eps_axiom * std::max(std::abs(forward[k]), std::abs(back)))
                flag(Axiom::symmetry, {a, b}, forward[k], back);
            if (forward[k] == 0.0 && !(a == b))
                flag(Axiom::indiscernibility, {a, b}, forward[k], 0.0);
        }
        const double rhs = params.alpha * d.xz + params.beta * d.zy;
        if (!detail::leq_slack(d.xy, rhs)) flag(Axiom::triangle, {t.x, t.y, t.z}, d.xy, rhs);
        ++report.triples_checked;
    }
    report.passed = report.violations.empty();
    return report;
}

/// Seeded random triples plus any caller-supplied witness triples.
template <class Point>
AxiomReport<Point> verify_axioms(const MetricSpace<Point>& space, const AlphaBetaParams& params,
                                 std::uint64_t seed, std::size_t n_triples,
                                 std::span<const Triple<Point>> witnesses = {}) {
    if (n_triples < 1) throw DomainError("n_triples must be >= 1");
    auto triples = sample_triples(space.domain, seed, n_triples);
    triples.insert(triples.end(), witnesses.begin(), witnesses.end());
    return verify_axioms(space, params, std::span<const Triple<Point>>(triples));
}

template <class Point>
struct ConstantEstimate {
    double value = 1.0;
    std::optional<Triple<Point>> attained_at;  // empty when the clamp at 1 is active
};

/// Smallest S >= 1 with G(x,y) <= S*(G(x,z) + G(z,y)) on every triple.
template <class Point>
ConstantEstimate<Point> estimate_min_symmetric_constant(const MetricSpace<Point>& space,
                                                        std::span<const Triple<Point>> triples) {
    detail::require_nonempty(triples);
    ConstantEstimate<Point> best;
    for (const auto& t : triples) {
        const auto d = detail::triple_distances(space, t);
        const double denom = d.xz + d.zy;
        if (denom <= 0.0) continue;
        const double ratio = d.xy / denom;
        if (ratio > best.value) {
            best.value = ratio;
            best.attained_at = t;
        }
    }
    return best;
}

/// Smallest beta >= 1 with G(x,y) <= alpha*G(x,z) + beta*G(z,y) on every triple.
template <class Point>
ConstantEstimate<Point> estimate_min_beta_given_alpha(const MetricSpace<Point>& space, double alpha,
                                                      std::span<const Triple<Point>> triples) {
    if (!(alpha >= 1.0)) throw ContractError("alpha must be >= 1");
    detail::require_nonempty(triples);
    ConstantEstimate<Point> best;
    for (const auto& t : triples) {
        const auto d = detail::triple_distances(space, t);
        if (d.zy <= 0.0) continue;
        const double ratio = (d.xy - alpha * d.xz) / d.zy;
        if (ratio > best.value) {
            best.value = ratio;
            best.attained_at = t;
        }
    }
    return best;
}

inline const std::vector<double>& default_alpha_grid() {
    static const std::vector<double> grid{1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0};
    return grid;
}

/// Empirical (alpha, beta) Pareto frontier: minimal beta for each alpha.
template <class Point>
std::vector<AlphaBetaParams> frontier(const MetricSpace<Point>& space,
                                      std::span<const Triple<Point>> triples,
                                      std::span<const double> alphas = default_alpha_grid()) {
    std::vector<AlphaBetaParams> out;
    out.reserve(alphas.size());
    for (double a : alphas) out.push_back({a, estimate_min_beta_given_alpha(space, a, triples).value});
    return out;
}

enum class SpaceClass { metric, strong_b, b_metric, alpha_beta, unknown };

inline std::string_view to_string(SpaceClass c) {
    switch (c) {
    case SpaceClass::metric: return "metric";
    case SpaceClass::strong_b: return "strong-b";
    case SpaceClass::b_metric: return "b-metric";
    case SpaceClass::alpha_beta: return "alpha-beta";
    case SpaceClass::unknown: return "unknown";
    }
    return "?";
}

struct Classification {
    SpaceClass label = SpaceClass::unknown;
    double symmetric_constant = 1.0;     // estimated S
    std::optional<AlphaBetaParams> certificate;  // pair the label passed at
    std::vector<AlphaBetaParams> frontier;
};

/// Strongest label the sampled triples support: metric at (1,1), strong-b at
/// (1,S), b-metric at (S,S), alpha-beta at some frontier pair, else unknown.
template <class Point>
Classification classify_space(const MetricSpace<Point>& space, std::span<const Triple<Point>> triples,
                              std::span<const double> alphas = default_alpha_grid()) {
    Classification c;
    c.symmetric_constant = estimate_min_symmetric_constant(space, triples).value;
    c.frontier = frontier(space, triples, alphas);
    const double s = c.symmetric_constant;
    auto passes = [&](AlphaBetaParams p) {
        return std::isfinite(p.alpha) && std::isfinite(p.beta) &&
               verify_axioms(space, p, triples).passed;
    };
    const std::pair<SpaceClass, AlphaBetaParams> ladder[] = {
        {SpaceClass::metric, {1.0, 1.0}},
        {SpaceClass::strong_b, {1.0, s}},
        {SpaceClass::b_metric, {s, s}},
    };
    for (const auto& [label, p] : ladder) {
        if (passes(p)) {
            c.label = label;
            c.certificate = p;
            return c;
        }
    }
    for (const auto& p : c.frontier) {
        if (passes(p)) {
            c.label = SpaceClass::alpha_beta;
            c.certificate = p;
            return c;
        }
    }
    return c;
}

template <class Point>
Classification classify_space(const MetricSpace<Point>& space, std::uint64_t seed,
                              std::size_t n_triples) {
    if (n_triples < 1) throw DomainError("n_triples must be >= 1");
    const auto triples = sample_triples(space.domain, seed, n_triples);
    return classify_space(space, std::span<const Triple<Point>>(triples));
}

} // namespace abfix
