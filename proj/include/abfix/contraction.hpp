#pragma once

// Contraction classes on (alpha,beta)-metric spaces and the per-step rate K
// each one guarantees for Picard residuals: G(x_{n+1},x_{n+2}) <= K G(x_n,x_{n+1}).

#include "abfix/error.hpp"
#include "abfix/metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace abfix {

enum class ContractionKind { banach, alpha_beta, weak_alpha_beta, kannan, reich };

inline std::string_view to_string(ContractionKind k) {
    switch (k) {
    case ContractionKind::banach: return "banach";
    case ContractionKind::alpha_beta: return "alpha-beta";
    case ContractionKind::weak_alpha_beta: return "weak-alpha-beta";
    case ContractionKind::kannan: return "kannan";
    case ContractionKind::reich: return "reich";
    }
    return "?";
}

inline std::optional<ContractionKind> parse_contraction_kind(std::string_view s) {
    for (auto k : {ContractionKind::banach, ContractionKind::alpha_beta,
                   ContractionKind::weak_alpha_beta, ContractionKind::kannan, ContractionKind::reich})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// G(Px,Py) <= k G(x,y)
struct Banach {
    double k = 0.0;
    bool operator==(const Banach&) const = default;
};

/// G(Px,Py) <= xi1 G(x,y) + xi2 [G(x,Px) + G(y,Py)]
struct AlphaBeta {
    double xi1 = 0.0;
    double xi2 = 0.0;
    bool operator==(const AlphaBeta&) const = default;
};

/// G(Px,Py) <= xi1 G(x,y) + xi2 max[G(x,Px), G(y,Py)]
struct WeakAlphaBeta {
    double xi1 = 0.0;
    double xi2 = 0.0;
    bool operator==(const WeakAlphaBeta&) const = default;
};

/// G(Px,Py) <= lambda [G(x,Px) + G(y,Py)]
struct Kannan {
    double lambda = 0.0;
    bool operator==(const Kannan&) const = default;
};

/// G(Px,Py) <= xi1 G(x,y) + xi2 G(x,Px) + xi3 G(y,Py)
struct Reich {
    double xi1 = 0.0;
    double xi2 = 0.0;
    double xi3 = 0.0;
    bool operator==(const Reich&) const = default;
};

using ContractionSpec = std::variant<Banach, AlphaBeta, WeakAlphaBeta, Kannan, Reich>;

inline ContractionKind kind_of(const ContractionSpec& spec) {
    return static_cast<ContractionKind>(spec.index());
}

namespace detail {

inline bool nonneg_finite(double v) { return v >= 0.0 && std::isfinite(v); }

} // namespace detail

/// Throws ContractError naming the violated hypothesis.
inline void validate(const ContractionSpec& spec) {
    using detail::nonneg_finite;
    std::visit(
        [](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Banach>) {
                if (!(nonneg_finite(c.k) && c.k < 1.0)) throw ContractError("K must lie in [0, 1)");
            } else if constexpr (std::is_same_v<T, Kannan>) {
                if (!(nonneg_finite(c.lambda) && c.lambda < 0.5))
                    throw ContractError("λ must lie in [0, 0.5)");
            } else if constexpr (std::is_same_v<T, Reich>) {
                if (!(nonneg_finite(c.xi1) && nonneg_finite(c.xi2) && nonneg_finite(c.xi3)))
                    throw ContractError("ξ1, ξ2, ξ3 must be >= 0");
                if (!(c.xi1 + c.xi2 + c.xi3 < 1.0)) throw ContractError("ξ1 + ξ2 + ξ3 must be < 1");
            } else {
                if (!(nonneg_finite(c.xi1) && nonneg_finite(c.xi2)))
                    throw ContractError("ξ1, ξ2 must be >= 0");
                if (!(c.xi1 + c.xi2 < 1.0)) throw ContractError("ξ1 + ξ2 must be < 1");
                // (xi1+xi2)/(1-xi2) < 1 needs the stronger xi1 + 2 xi2 < 1.
                if constexpr (std::is_same_v<T, AlphaBeta>)
                    if (!(c.xi1 + 2.0 * c.xi2 < 1.0))
                        throw ContractError("ξ1 + 2ξ2 must be < 1 so that (ξ1+ξ2)/(1-ξ2) < 1");
            }
        },
        spec);
}

inline bool is_admissible(const ContractionSpec& spec) {
    try {
        validate(spec);
        return true;
    } catch (const ContractError&) {
        return false;
    }
}

/// Per-step residual rate K in [0,1). The weak kind takes the larger of its
/// two proof cases since either can occur at any step.
inline double derived_rate(const ContractionSpec& spec) {
    validate(spec);
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Banach>) return c.k;
            else if constexpr (std::is_same_v<T, AlphaBeta>) return (c.xi1 + c.xi2) / (1.0 - c.xi2);
            else if constexpr (std::is_same_v<T, WeakAlphaBeta>)
                return std::max(c.xi1 / (1.0 - c.xi2), c.xi1 + c.xi2);
            else if constexpr (std::is_same_v<T, Kannan>) return c.lambda / (1.0 - c.lambda);
            else return (c.xi1 + c.xi2) / (1.0 - c.xi3);
        },
        spec);
}

template <class Point>
using SelfMap = std::function<Point(const Point&)>;

template <class Point>
struct Pair {
    Point x;
    Point y;
};

template <class Point>
std::vector<Pair<Point>> sample_pairs(const Domain<Point>& domain, std::uint64_t seed, std::size_t n) {
    if (!domain.sample) throw DomainError("domain has no sampler");
    Rng rng(seed);
    std::vector<Pair<Point>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point x = domain.sample(rng);
        Point y = domain.sample(rng);
        out.push_back({std::move(x), std::move(y)});
    }
    return out;
}

/// All ordered pairs of `points`.
template <class Point>
std::vector<Pair<Point>> enumerate_pairs(std::span<const Point> points) {
    if (points.empty()) throw DomainError("finite point set is empty");
    std::vector<Pair<Point>> out;
    out.reserve(points.size() * points.size());
    for (const auto& x : points)
        for (const auto& y : points) out.push_back({x, y});
    return out;
}

inline bool is_finite_point(double x) { return std::isfinite(x); }
inline bool is_finite_point(const GridFunction& u) { return u.all_finite(); }

/// Applies `map`, rejecting non-finite output and output outside the domain.
template <class Point>
Point apply_checked(const SelfMap<Point>& map, const MetricSpace<Point>& space, const Point& x) {
    Point y = map(x);
    if (!is_finite_point(y))
        throw EvaluationError("map produced a non-finite value at " + describe(x));
    if (space.domain.contains && !space.domain.contains(y))
        throw ClosureError("map sends " + describe(x) + " to " + describe(y) +
                           ", outside the " + space.domain.kind + " domain");
    return y;
}

namespace detail {

// The four distances every contraction inequality is built from.
struct PairTerms {
    double xy;   // G(x,y)
    double img;  // G(Px,Py)
    double dx;   // G(x,Px)
    double dy;   // G(y,Py)
};

template <class Point>
std::vector<PairTerms> pair_terms(const SelfMap<Point>& map, const MetricSpace<Point>& space,
                                  std::span<const Pair<Point>> pairs) {
    std::vector<PairTerms> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        const Point px = apply_checked(map, space, p.x);
        const Point py = apply_checked(map, space, p.y);
        out.push_back({checked_distance(space, p.x, p.y), checked_distance(space, px, py),
                       checked_distance(space, p.x, px), checked_distance(space, p.y, py)});
    }
    return out;
}

inline double contraction_rhs(const ContractionSpec& spec, const PairTerms& t) {
    return std::visit(
        [&t](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Banach>) return c.k * t.xy;
            else if constexpr (std::is_same_v<T, AlphaBeta>) return c.xi1 * t.xy + c.xi2 * (t.dx + t.dy);
            else if constexpr (std::is_same_v<T, WeakAlphaBeta>)
                return c.xi1 * t.xy + c.xi2 * std::max(t.dx, t.dy);
            else if constexpr (std::is_same_v<T, Kannan>) return c.lambda * (t.dx + t.dy);
            else return c.xi1 * t.xy + c.xi2 * t.dx + c.xi3 * t.dy;
        },
        spec);
}

// rhs - lhs scaled by max(1, |lhs|, |rhs|), so eps_axiom acts as a relative slack.
inline double scaled_slack(double lhs, double rhs) {
    return (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

} // namespace detail

template <class Point>
struct ConditionReport {
    bool holds = true;
    std::optional<Pair<Point>> worst_pair;
    double worst_slack = 0.0;  // scaled rhs - lhs; most negative seen
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    std::size_t pairs_checked = 0;
};

/// Evaluates the kind's inequality on every pair.
template <class Point>
ConditionReport<Point> check_condition(const ContractionSpec& spec, const SelfMap<Point>& map,
                                       const MetricSpace<Point>& space,
                                       std::span<const Pair<Point>> pairs) {
    validate(spec);
    if (pairs.empty()) throw DomainError("no pairs to check (n_pairs must be >= 1)");
    const auto terms = detail::pair_terms(map, space, pairs);
    ConditionReport<Point> report;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double lhs = terms[i].img;
        const double rhs = detail::contraction_rhs(spec, terms[i]);
        const double slack = detail::scaled_slack(lhs, rhs);
        if (!report.worst_pair || slack < report.worst_slack) {
            report.worst_slack = slack;
            report.worst_pair = pairs[i];
            report.worst_lhs = lhs;
            report.worst_rhs = rhs;
        }
    }
    report.pairs_checked = terms.size();
    report.holds = report.worst_slack >= -eps_axiom;
    return report;
}

template <class Point>
ConditionReport<Point> check_condition(const ContractionSpec& spec, const SelfMap<Point>& map,
                                       const MetricSpace<Point>& space, std::uint64_t seed,
                                       std::size_t n_pairs) {
    const auto pairs = sample_pairs(space.domain, seed, n_pairs);
    return check_condition(spec, map, space, std::span<const Pair<Point>>(pairs));
}

/// Grid used to sweep the secondary constants of multi-parameter kinds.
inline std::vector<double> constant_sweep_grid() {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back(i / 20.0);
    return g;
}

namespace detail {

// Smallest xi1 >= 0 making  img <= xi1*xy + extra(t)  on all pairs with xy > 0.
template <class Extra>
double min_leading_constant(std::span<const PairTerms> terms, Extra&& extra) {
    double xi1 = 0.0;
    for (const auto& t : terms)
        if (t.xy > 0.0) xi1 = std::max(xi1, (t.img - extra(t)) / t.xy);
    return xi1;
}

inline std::optional<ContractionSpec> pick_best(std::vector<ContractionSpec> candidates) {
    std::optional<ContractionSpec> best;
    double best_xi1 = 0.0;
    double best_rate = 0.0;
    for (auto& c : candidates) {
        if (!is_admissible(c)) continue;
        const double xi1 = std::visit(
            [](const auto& s) -> double {
                if constexpr (requires { s.xi1; }) return s.xi1;
                else return 0.0;
            },
            c);
        const double rate = derived_rate(c);
        if (!best || xi1 < best_xi1 || (xi1 == best_xi1 && rate < best_rate)) {
            best = c;
            best_xi1 = xi1;
            best_rate = rate;
        }
    }
    return best;
}

} // namespace detail

/// Empirical constants of the given kind for `map`, or nullopt when no
/// admissible constants fit the sampled pairs.
template <class Point>
std::optional<ContractionSpec> estimate_constants(ContractionKind kind, const SelfMap<Point>& map,
                                                  const MetricSpace<Point>& space,
                                                  std::span<const Pair<Point>> pairs) {
    if (pairs.empty()) throw DomainError("no pairs to fit (n_pairs must be >= 1)");
    const auto terms = detail::pair_terms(map, space, pairs);
    const std::span<const detail::PairTerms> ts(terms);
    const auto grid = constant_sweep_grid();
    std::vector<ContractionSpec> candidates;

    switch (kind) {
    case ContractionKind::banach: {
        double k = 0.0;
        for (const auto& t : ts)
            if (t.xy > 0.0) k = std::max(k, t.img / t.xy);
        candidates.push_back(Banach{k});
        break;
    }
    case ContractionKind::kannan: {
        double lambda = 0.0;
        for (const auto& t : ts)
            if (t.dx + t.dy > 0.0) lambda = std::max(lambda, t.img / (t.dx + t.dy));
        candidates.push_back(Kannan{lambda});
        break;
    }
    case ContractionKind::alpha_beta:
        for (double xi2 : grid) {
            const double xi1 = detail::min_leading_constant(
                ts, [xi2](const detail::PairTerms& t) { return xi2 * (t.dx + t.dy); });
            candidates.push_back(AlphaBeta{xi1, xi2});
        }
        break;
    case ContractionKind::weak_alpha_beta:
        for (double xi2 : grid) {
            const double xi1 = detail::min_leading_constant(
                ts, [xi2](const detail::PairTerms& t) { return xi2 * std::max(t.dx, t.dy); });
            candidates.push_back(WeakAlphaBeta{xi1, xi2});
        }
        break;
    case ContractionKind::reich:
        for (double xi2 : grid)
            for (double xi3 : grid) {
                if (xi2 + xi3 >= 1.0) continue;
                const double xi1 = detail::min_leading_constant(
                    ts, [xi2, xi3](const detail::PairTerms& t) { return xi2 * t.dx + xi3 * t.dy; });
                candidates.push_back(Reich{xi1, xi2, xi3});
            }
        break;
    }
    return detail::pick_best(std::move(candidates));
}

template <class Point>
std::optional<ContractionSpec> estimate_constants(ContractionKind kind, const SelfMap<Point>& map,
                                                  const MetricSpace<Point>& space, std::uint64_t seed,
                                                  std::size_t n_pairs) {
    const auto pairs = sample_pairs(space.domain, seed, n_pairs);
    return estimate_constants(kind, map, space, std::span<const Pair<Point>>(pairs));
}

} // namespace abfix
