#pragma once

// Picard iteration x_{n+1} = P(x_n) with an a posteriori residual stop and,
// when beta*K < 1, the Cauchy estimate
//     G(x_n, x_m) <= alpha K^n / (1 - beta K) * G(x_0, x_1),   m > n.

#include "abfix/contraction.hpp"
#include "abfix/error.hpp"
#include "abfix/metric.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abfix {

enum class StopMode {
    a_posteriori,            // residual <= tol
    a_priori_if_available,   // also tail bound alpha*K/(1-beta*K)*residual <= tol when defined
};

inline std::string_view to_string(StopMode m) {
    return m == StopMode::a_posteriori ? "a-posteriori" : "a-priori-if-available";
}

struct StoppingRule {
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    StopMode mode = StopMode::a_posteriori;

    bool operator==(const StoppingRule&) const = default;
};

inline void require_valid(const StoppingRule& s) {
    if (!(s.tol > 0.0)) throw ContractError("tol must be > 0");
    if (s.max_iter < 1) throw ContractError("max_iter must be >= 1");
}

enum class Termination { converged, max_iter, stagnated };

inline std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iter: return "max-iter";
    case Termination::stagnated: return "stagnated";
    }
    return "?";
}

/// Consecutive non-decreasing residuals (above tol) that end a run as stagnated.
inline constexpr std::size_t stagnation_window = 8;

template <class Point>
struct FixedPointResult {
    Point fixed_point;
    std::vector<Point> trace;        // x_0 .. x_N
    std::vector<double> residuals;   // residuals[n] = G(x_n, x_{n+1}), size N
    std::size_t n_iter = 0;          // map evaluations, N
    Termination termination = Termination::max_iter;
    std::optional<double> rate;      // K used for bounds, when known
    AlphaBetaParams params;
    std::optional<std::vector<double>> a_priori_bounds;  // per trace index, iff beta*K < 1

    double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
    bool bound_available() const { return a_priori_bounds.has_value(); }
};

/// alpha K^n / (1 - beta K) * d01, or nullopt when beta K >= 1.
inline std::optional<double> a_priori_bound(const AlphaBetaParams& params, double k, double d01,
                                            std::size_t n) {
    require_valid(params);
    if (!(k >= 0.0 && k < 1.0)) throw ContractError("K must lie in [0, 1)");
    if (!(d01 >= 0.0)) throw ContractError("G(x0, x1) must be >= 0");
    const double bk = params.beta * k;
    if (bk >= 1.0) return std::nullopt;
    return params.alpha * std::pow(k, static_cast<double>(n)) / (1.0 - bk) * d01;
}

/// Smallest n with a_priori_bound(n) <= tol, or nullopt when beta K >= 1.
inline std::optional<std::size_t> iterations_needed(const AlphaBetaParams& params, double k,
                                                    double d01, double tol) {
    require_valid(params);
    if (!(k > 0.0 && k < 1.0)) throw ContractError("K must lie in (0, 1)");
    if (!(d01 > 0.0)) throw ContractError("G(x0, x1) must be > 0");
    if (!(tol > 0.0)) throw ContractError("tol must be > 0");
    if (params.beta * k >= 1.0) return std::nullopt;
    const double raw =
        std::ceil(std::log(tol * (1.0 - params.beta * k) / (params.alpha * d01)) / std::log(k));
    std::size_t n = raw > 0.0 ? static_cast<std::size_t>(raw) : 0;
    // Closed form can land one off under rounding; settle on the exact first n.
    while (*a_priori_bound(params, k, d01, n) > tol) ++n;
    while (n > 0 && *a_priori_bound(params, k, d01, n - 1) <= tol) --n;
    return n;
}

/// Length of the run of strictly increasing residuals ending at the last one.
inline std::size_t growth_streak(const std::vector<double>& residuals) {
    std::size_t streak = 0;
    for (std::size_t i = residuals.size(); i-- > 1;) {
        if (!(residuals[i] > residuals[i - 1])) break;
        ++streak;
    }
    return streak;
}

/// Picard iteration with an optional known rate. Bounds are attached when
/// rate is known and beta*rate < 1.
template <class Point>
FixedPointResult<Point> picard_with_rate(const SelfMap<Point>& map, const MetricSpace<Point>& space,
                                         const Point& x0, std::optional<double> rate,
                                         const StoppingRule& stop) {
    require_valid(stop);
    require_valid(space.params);
    if (!is_finite_point(x0)) throw EvaluationError("initial point is not finite");
    if (space.domain.contains && !space.domain.contains(x0))
        throw ClosureError("initial point " + describe(x0) + " lies outside the " +
                           space.domain.kind + " domain");

    const AlphaBetaParams& ab = space.params;
    const bool bound_ok = rate && *rate >= 0.0 && *rate < 1.0 && ab.beta * *rate < 1.0;
    const double tail_factor = bound_ok ? ab.alpha * *rate / (1.0 - ab.beta * *rate) : 0.0;

    FixedPointResult<Point> r{x0, {x0}, {}, 0, Termination::max_iter, rate, ab, std::nullopt};
    std::size_t flat_steps = 0;
    while (r.n_iter < stop.max_iter) {
        Point next = apply_checked(map, space, r.trace.back());
        const double res = detail::checked_distance(space, r.trace.back(), next);
        r.trace.push_back(std::move(next));
        r.residuals.push_back(res);
        ++r.n_iter;

        bool done = res <= stop.tol;
        if (done && stop.mode == StopMode::a_priori_if_available && bound_ok)
            done = tail_factor * res <= stop.tol;
        if (done) {
            r.termination = Termination::converged;
            break;
        }
        const std::size_t n = r.residuals.size();
        flat_steps = (n >= 2 && res >= r.residuals[n - 2]) ? flat_steps + 1 : 0;
        if (flat_steps >= stagnation_window) {
            r.termination = Termination::stagnated;
            break;
        }
    }
    r.fixed_point = r.trace.back();

    if (bound_ok) {
        const double d01 = r.residuals.front();
        std::vector<double> bounds(r.trace.size());
        for (std::size_t n = 0; n < bounds.size(); ++n)
            bounds[n] = *a_priori_bound(ab, *rate, d01, n);
        r.a_priori_bounds = std::move(bounds);
    }
    return r;
}

/// Throws DivergenceError when a stagnated run's residuals grew over the
/// whole stagnation window.
template <class Point>
void throw_if_diverging(const FixedPointResult<Point>& r, const std::string& what) {
    if (r.termination != Termination::stagnated) return;
    if (growth_streak(r.residuals) < stagnation_window) return;
    const auto& res = r.residuals;
    const double factor = std::pow(res.back() / res[res.size() - 1 - stagnation_window],
                                   1.0 / static_cast<double>(stagnation_window));
    throw DivergenceError(what + " diverges: residuals grew for " +
                              std::to_string(stagnation_window) +
                              " consecutive steps, measured factor " + describe(factor),
                          factor);
}

/// Picard iteration under an admissible contraction spec; K = derived_rate(spec).
template <class Point>
FixedPointResult<Point> picard(const SelfMap<Point>& map, const MetricSpace<Point>& space,
                               const Point& x0, const ContractionSpec& spec, const StoppingRule& stop) {
    return picard_with_rate(map, space, x0, std::optional<double>(derived_rate(spec)), stop);
}

} // namespace abfix
