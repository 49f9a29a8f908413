#pragma once

// Dispatch of a validated ProblemFile to the solver modules, plus the JSON
// summary / CSV trace writers. Summaries carry no timestamps, so identical
// inputs give byte-identical files.

#include "abfix/cli/problem.hpp"
#include "abfix/contraction.hpp"
#include "abfix/error.hpp"
#include "abfix/fredholm.hpp"
#include "abfix/iterate.hpp"
#include "abfix/metric.hpp"
#include "abfix/ode.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abfix::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_validation = 2,
    exit_divergence = 3,
    exit_evaluation = 4,
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool strict = false;
    std::optional<std::uint64_t> seed;  // overrides the file's seed
};

struct RunOutcome {
    int exit_code = exit_ok;
    json summary;
    std::string message;  // error text when exit_code != 0
};

// --- built-in instances ---------------------------------------------------

inline SelfMap<double> builtin_map(const std::string& name) {
    if (name == "x/4") return [](const double& x) { return x / 4.0; };
    if (name == "identity") return [](const double& x) { return x; };
    if (name == "zero") return [](const double&) { return 0.0; };
    throw ValidationError("map", "unknown built-in map '" + name + "'");
}

/// F(s,t,u): "fredholm-linear" = s + s t u / 2, "quarter-u" = u / 4, "zero" = 0.
inline Kernel builtin_kernel(const std::string& name) {
    if (name == "fredholm-linear") return [](double s, double t, double u) { return s + 0.5 * s * t * u; };
    if (name == "quarter-u") return [](double, double, double u) { return 0.25 * u; };
    if (name == "zero") return [](double, double, double) { return 0.0; };
    throw ValidationError("kernel", "unknown built-in kernel '" + name + "'");
}

/// f(s,u): "ode-decay" = -u, "ode-poly" = 2 s, "zero" = 0.
inline Rhs builtin_rhs_fn(const std::string& name) {
    if (name == "ode-decay") return [](double, double u) { return -u; };
    if (name == "ode-poly") return [](double s, double) { return 2.0 * s; };
    if (name == "zero") return [](double, double) { return 0.0; };
    throw ValidationError("rhs", "unknown built-in rhs '" + name + "'");
}

inline Domain<double> scalar_domain(const DomainSpec& d) {
    if (d.interval) return interval_domain((*d.interval)[0], (*d.interval)[1]);
    if (d.points) return point_domain(*d.points);
    throw DomainError("scalar spaces need an interval or points domain");
}

inline UniformGrid grid_of(const GridSpec& g) { return UniformGrid(g.lower, g.upper, g.intervals); }

// --- output helpers -------------------------------------------------------

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json point_json(double x) { return x; }
inline json point_json(const GridFunction& u) { return describe(u); }

inline json rate_json(const std::optional<double>& k) { return k ? json(*k) : json(nullptr); }

/// iteration,residual,a_priori_bound (bound column empty when unavailable).
template <class Point>
std::string trace_csv(const FixedPointResult<Point>& r) {
    std::string out = "iteration,residual,a_priori_bound\n";
    for (std::size_t n = 0; n < r.residuals.size(); ++n) {
        out += std::to_string(n) + "," + fmt_double(r.residuals[n]) + ",";
        if (r.a_priori_bounds) out += fmt_double((*r.a_priori_bounds)[n]);
        out += "\n";
    }
    return out;
}

inline std::string solution_csv(const GridFunction& u) {
    std::string out = "node,value\n";
    for (std::size_t i = 0; i < u.size(); ++i)
        out += fmt_double(u.grid().node(i)) + "," + fmt_double(u[i]) + "\n";
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

inline std::string summary_text(const json& summary) { return summary.dump(2) + "\n"; }

template <class Point>
json iteration_json(const FixedPointResult<Point>& r) {
    return {{"K", rate_json(r.rate)},
            {"termination", std::string(to_string(r.termination))},
            {"n_iter", r.n_iter},
            {"final_residual", r.final_residual()},
            {"bound_available", r.bound_available()},
            {"alpha", r.params.alpha},
            {"beta", r.params.beta}};
}

template <class Point>
json report_json(const AxiomReport<Point>& rep, std::size_t max_listed = 20) {
    json vs = json::array();
    for (std::size_t i = 0; i < rep.violations.size() && i < max_listed; ++i) {
        const auto& v = rep.violations[i];
        json w = json::array();
        for (const auto& p : v.witness) w.push_back(point_json(p));
        vs.push_back({{"axiom", std::string(to_string(v.axiom))}, {"witness", w}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    }
    return {{"passed", rep.passed},
            {"triples_checked", rep.triples_checked},
            {"violation_count", rep.violations.size()},
            {"violations", vs}};
}

inline json classification_json(const Classification& c) {
    json frontier = json::array();
    for (const auto& p : c.frontier) frontier.push_back({{"alpha", p.alpha}, {"beta", p.beta}});
    return {{"label", std::string(to_string(c.label))},
            {"symmetric_constant", c.symmetric_constant},
            {"certificate", c.certificate ? json{{"alpha", c.certificate->alpha}, {"beta", c.certificate->beta}}
                                          : json(nullptr)},
            {"frontier", frontier}};
}

// --- dispatch ---------------------------------------------------------------

namespace detail {

struct Artifacts {
    json result;
    std::optional<std::string> trace;
    std::optional<std::string> solution;
};

template <class Point>
std::vector<Triple<Point>> triples_for(const MetricSpace<Point>& space, std::uint64_t seed, std::size_t n,
                                       bool exhaustive) {
    auto triples = sample_triples(space.domain, seed, n);
    if (exhaustive) {
        const auto all = enumerate_triples(std::span<const Point>(space.domain.points));
        triples.insert(triples.end(), all.begin(), all.end());
    }
    return triples;
}

inline Artifacts run_task(const VerifyMetricTask& t, std::uint64_t seed, const RunOptions&) {
    if (t.space == "sup-grid") {
        const auto space = sup_grid_space(grid_of(*t.domain.grid), t.domain.grid->radius);
        const auto triples = sample_triples(space.domain, seed, t.n_triples);
        return {report_json(verify_axioms(space, t.params, std::span<const Triple<GridFunction>>(triples))), {}, {}};
    }
    const auto space = named_scalar_space(t.space, scalar_domain(t.domain));
    auto triples = triples_for(space, seed, t.n_triples, t.exhaustive);
    for (const auto& w : t.witnesses) triples.push_back({w[0], w[1], w[2]});
    return {report_json(verify_axioms(space, t.params, std::span<const Triple<double>>(triples))), {}, {}};
}

inline Artifacts run_task(const ClassifyTask& t, std::uint64_t seed, const RunOptions&) {
    if (t.space == "sup-grid") {
        const auto space = sup_grid_space(grid_of(*t.domain.grid), t.domain.grid->radius);
        const auto triples = sample_triples(space.domain, seed, t.n_triples);
        return {classification_json(classify_space(space, std::span<const Triple<GridFunction>>(triples),
                                                   std::span<const double>(t.alphas))),
                {}, {}};
    }
    const auto space = named_scalar_space(t.space, scalar_domain(t.domain));
    const auto triples = triples_for(space, seed, t.n_triples, t.exhaustive);
    return {classification_json(
                classify_space(space, std::span<const Triple<double>>(triples), std::span<const double>(t.alphas))),
            {}, {}};
}

inline Artifacts run_task(const EstimateContractionTask& t, std::uint64_t seed, const RunOptions&) {
    const auto space = named_scalar_space(t.space, scalar_domain(t.domain));
    const auto map = builtin_map(t.map);
    const auto pairs = sample_pairs(space.domain, seed, t.n_pairs);
    const std::span<const Pair<double>> ps(pairs);
    const auto spec = estimate_constants(t.kind, map, space, ps);
    json r = {{"kind", std::string(to_string(t.kind))}, {"feasible", spec.has_value()}};
    if (spec) {
        const auto check = check_condition(*spec, map, space, ps);
        r["constants"] = to_json(*spec);
        r["K"] = derived_rate(*spec);
        r["check"] = {{"holds", check.holds}, {"worst_slack", check.worst_slack},
                      {"pairs_checked", check.pairs_checked}};
    } else {
        r["constants"] = nullptr;
        r["K"] = nullptr;
    }
    return {r, {}, {}};
}

inline Artifacts run_task(const SolveMapTask& t, std::uint64_t, const RunOptions&) {
    auto space = named_scalar_space(t.space, scalar_domain(t.domain));
    space.params = t.params;
    const auto res = picard(builtin_map(t.map), space, t.x0, t.contraction, t.stop);
    json r = iteration_json(res);
    r["fixed_point"] = res.fixed_point;
    r["constants"] = to_json(t.contraction);
    return {r, trace_csv(res), {}};
}

template <class Report>
json grid_solve_json(const Report& rep) {
    json r = iteration_json(rep.result);
    r["lipschitz"] = rep.lipschitz;
    r["lipschitz_estimated"] = rep.lipschitz_estimated;
    r["factor"] = rep.factor;
    r["warnings"] = rep.warnings;
    r["constants"] = rep.factor < 1.0 ? to_json(ContractionSpec(Banach{rep.factor})) : json(nullptr);
    return r;
}

inline Artifacts run_task(const SolveFredholmTask& t, std::uint64_t seed, const RunOptions& o) {
    const FredholmProblem p{builtin_kernel(t.kernel), t.m, t.n, t.lipschitz};
    fredholm::SolveOptions opt;
    opt.intervals = t.intervals;
    opt.quadrature = t.quadrature;
    opt.stop = t.stop;
    opt.strict = o.strict;
    opt.seed = seed;
    if (t.x0) opt.initial = GridFunction::constant(UniformGrid(t.m, t.n, t.intervals), *t.x0);
    const auto rep = fredholm::solve(p, opt);
    return {grid_solve_json(rep), trace_csv(rep.result), solution_csv(rep.result.fixed_point)};
}

inline Artifacts run_task(const SolveOdeTask& t, std::uint64_t seed, const RunOptions& o) {
    const OdeProblem p{builtin_rhs_fn(t.rhs), t.s0, t.r0, t.h, t.lipschitz};
    ode::SolveOptions opt;
    opt.nodes_per_side = t.nodes_per_side;
    opt.stop = t.stop;
    opt.strict = o.strict;
    opt.seed = seed;
    const auto rep = ode::solve_ivp(p, opt);
    json r = grid_solve_json(rep);
    if (rep.factor >= 1.0) r["max_admissible_h"] = ode::max_admissible_h(rep.lipschitz);
    return {r, trace_csv(rep.result), solution_csv(rep.result.fixed_point)};
}

} // namespace detail

/// Runs one task and writes its summary (and trace / solution when iterative)
/// under opts.out_dir. Library errors map to exit codes; I/O errors propagate.
inline RunOutcome run(const ProblemFile& problem, const RunOptions& opts = {}) {
    const std::uint64_t seed = opts.seed.value_or(problem.seed);
    RunOutcome out;
    out.summary = {{"version", problem.version},
                   {"task", std::string(task_name(problem.task))},
                   {"seed", seed},
                   {"strict", opts.strict},
                   {"inputs", task_to_json(problem.task)}};
    std::optional<detail::Artifacts> art;
    try {
        art = std::visit([&](const auto& t) { return detail::run_task(t, seed, opts); }, problem.task);
    } catch (const ValidationError& e) {
        out.exit_code = exit_validation;
        out.message = e.what();
    } catch (const ContractError& e) {
        out.exit_code = exit_validation;
        out.message = e.what();
    } catch (const PreconditionError& e) {
        out.exit_code = exit_divergence;
        out.message = e.what();
        out.summary["precondition"] = {{"factor", e.factor()}, {"satisfied", false}};
    } catch (const DivergenceError& e) {
        out.exit_code = exit_divergence;
        out.message = e.what();
        out.summary["measured_factor"] = e.measured_factor();
    } catch (const EvaluationError& e) {
        out.exit_code = exit_evaluation;
        out.message = e.what();
    } catch (const DomainError& e) {
        out.exit_code = exit_evaluation;
        out.message = e.what();
    }

    out.summary["status"] = out.exit_code == exit_ok ? "ok" : "error";
    if (art) {
        out.summary["result"] = art->result;
        if (art->trace) write_text(opts.out_dir / problem.outputs.trace, *art->trace);
        if (art->solution) write_text(opts.out_dir / problem.outputs.solution, *art->solution);
    } else {
        out.summary["error"] = out.message;
    }
    write_text(opts.out_dir / problem.outputs.summary, summary_text(out.summary));
    return out;
}

/// JSON Schema (draft 2020-12) of the problem-file format.
inline const char* problem_schema() {
    return R"SCHEMA({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "abfix problem file",
  "type": "object",
  "additionalProperties": false,
  "required": ["version", "task"],
  "properties": {
    "version": {"const": "1"},
    "seed": {"type": "integer", "minimum": 0},
    "task": {"enum": ["verify-metric", "classify", "estimate-contraction", "solve-map", "solve-fredholm", "solve-ode"]},
    "outputs": {
      "type": "object", "additionalProperties": false,
      "properties": {"summary": {"type": "string"}, "trace": {"type": "string"}, "solution": {"type": "string"}}
    },
    "verify-metric": {
      "type": "object", "additionalProperties": false, "required": ["space", "domain"],
      "properties": {
        "space": {"enum": ["abs", "abs-squared", "sup-grid"]},
        "domain": {"$ref": "#/$defs/domain"},
        "alpha": {"type": "number", "minimum": 1}, "beta": {"type": "number", "minimum": 1},
        "n_triples": {"type": "integer", "minimum": 1},
        "exhaustive": {"type": "boolean"},
        "witnesses": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}}
      }
    },
    "classify": {
      "type": "object", "additionalProperties": false, "required": ["space", "domain"],
      "properties": {
        "space": {"enum": ["abs", "abs-squared", "sup-grid"]},
        "domain": {"$ref": "#/$defs/domain"},
        "n_triples": {"type": "integer", "minimum": 1},
        "exhaustive": {"type": "boolean"},
        "alphas": {"type": "array", "items": {"type": "number", "minimum": 1}, "minItems": 1}
      }
    },
    "estimate-contraction": {
      "type": "object", "additionalProperties": false, "required": ["map", "domain", "kind"],
      "properties": {
        "map": {"enum": ["x/4", "identity", "zero"]},
        "space": {"enum": ["abs", "abs-squared"]},
        "domain": {"$ref": "#/$defs/domain"},
        "kind": {"enum": ["banach", "alpha-beta", "weak-alpha-beta", "kannan", "reich"]},
        "n_pairs": {"type": "integer", "minimum": 1}
      }
    },
    "solve-map": {
      "type": "object", "additionalProperties": false, "required": ["map", "domain", "x0", "contraction"],
      "properties": {
        "map": {"enum": ["x/4", "identity", "zero"]},
        "space": {"enum": ["abs", "abs-squared"]},
        "domain": {"$ref": "#/$defs/domain"},
        "x0": {"type": "number"},
        "contraction": {"$ref": "#/$defs/contraction"},
        "alpha": {"type": "number", "minimum": 1}, "beta": {"type": "number", "minimum": 1},
        "tol": {"$ref": "#/$defs/tol"}, "max_iter": {"type": "integer", "minimum": 1}, "mode": {"$ref": "#/$defs/mode"}
      }
    },
    "solve-fredholm": {
      "type": "object", "additionalProperties": false, "required": ["kernel", "m", "n"],
      "properties": {
        "kernel": {"enum": ["fredholm-linear", "quarter-u", "zero"]},
        "m": {"type": "number"}, "n": {"type": "number"},
        "M": {"type": "integer", "minimum": 1},
        "quadrature": {"enum": ["trapezoid", "simpson"]},
        "lipschitz": {"type": "number", "exclusiveMinimum": 0},
        "x0": {"type": "number"},
        "tol": {"$ref": "#/$defs/tol"}, "max_iter": {"type": "integer", "minimum": 1}, "mode": {"$ref": "#/$defs/mode"}
      }
    },
    "solve-ode": {
      "type": "object", "additionalProperties": false, "required": ["rhs", "s0", "r0", "h"],
      "properties": {
        "rhs": {"enum": ["ode-decay", "ode-poly", "zero"]},
        "s0": {"type": "number"}, "r0": {"type": "number"},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "nodes_per_side": {"type": "integer", "minimum": 1},
        "lipschitz": {"type": "number", "exclusiveMinimum": 0},
        "tol": {"$ref": "#/$defs/tol"}, "max_iter": {"type": "integer", "minimum": 1}, "mode": {"$ref": "#/$defs/mode"}
      }
    }
  },
  "oneOf": [
    {"required": ["verify-metric"]}, {"required": ["classify"]}, {"required": ["estimate-contraction"]},
    {"required": ["solve-map"]}, {"required": ["solve-fredholm"]}, {"required": ["solve-ode"]}
  ],
  "$defs": {
    "tol": {"type": "number", "exclusiveMinimum": 0},
    "mode": {"enum": ["a-posteriori", "a-priori-if-available"]},
    "domain": {
      "type": "object", "additionalProperties": false, "minProperties": 1, "maxProperties": 1,
      "properties": {
        "interval": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "points": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "grid": {
          "type": "object", "additionalProperties": false, "required": ["lower", "upper", "intervals"],
          "properties": {"lower": {"type": "number"}, "upper": {"type": "number"},
                         "intervals": {"type": "integer", "minimum": 1}, "radius": {"type": "number", "exclusiveMinimum": 0}}
        }
      }
    },
    "contraction": {
      "oneOf": [
        {"type": "object", "additionalProperties": false, "required": ["kind", "K"],
         "properties": {"kind": {"const": "banach"}, "K": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}}},
        {"type": "object", "additionalProperties": false, "required": ["kind", "xi1", "xi2"],
         "properties": {"kind": {"enum": ["alpha-beta", "weak-alpha-beta"]},
                        "xi1": {"type": "number", "minimum": 0}, "xi2": {"type": "number", "minimum": 0}}},
        {"type": "object", "additionalProperties": false, "required": ["kind", "lambda"],
         "properties": {"kind": {"const": "kannan"}, "lambda": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.5}}},
        {"type": "object", "additionalProperties": false, "required": ["kind", "xi1", "xi2", "xi3"],
         "properties": {"kind": {"const": "reich"}, "xi1": {"type": "number", "minimum": 0},
                        "xi2": {"type": "number", "minimum": 0}, "xi3": {"type": "number", "minimum": 0}}}
      ]
    }
  }
}
)SCHEMA";
}

} // namespace abfix::cli
