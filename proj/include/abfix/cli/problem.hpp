#pragma once

// Problem files: one JSON object with a version, a seed, optional output
// paths, a "task" name and exactly one task block keyed by that name.
// Unknown keys are rejected at every level.

#include "abfix/contraction.hpp"
#include "abfix/error.hpp"
#include "abfix/grid.hpp"
#include "abfix/iterate.hpp"
#include "abfix/metric.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace abfix::cli {

using json = nlohmann::json;

inline constexpr std::string_view format_version = "1";

struct GridSpec {
    double lower = 0.0;
    double upper = 1.0;
    std::size_t intervals = 16;
    double radius = 1.0;
    bool operator==(const GridSpec&) const = default;
};

/// Exactly one of interval, points or grid is set.
struct DomainSpec {
    std::optional<std::array<double, 2>> interval;
    std::optional<std::vector<double>> points;
    std::optional<GridSpec> grid;
    bool operator==(const DomainSpec&) const = default;
};

struct VerifyMetricTask {
    std::string space;
    DomainSpec domain;
    AlphaBetaParams params;
    std::size_t n_triples = 10000;
    bool exhaustive = false;  // all triples of a finite point set, in addition to samples
    std::vector<std::array<double, 3>> witnesses;
    bool operator==(const VerifyMetricTask&) const = default;
};

struct ClassifyTask {
    std::string space;
    DomainSpec domain;
    std::size_t n_triples = 10000;
    bool exhaustive = false;
    std::vector<double> alphas = default_alpha_grid();
    bool operator==(const ClassifyTask&) const = default;
};

struct EstimateContractionTask {
    std::string map;
    std::string space = "abs";
    DomainSpec domain;
    ContractionKind kind = ContractionKind::banach;
    std::size_t n_pairs = 10000;
    bool operator==(const EstimateContractionTask&) const = default;
};

struct SolveMapTask {
    std::string map;
    std::string space = "abs";
    DomainSpec domain;
    double x0 = 0.0;
    ContractionSpec contraction;
    AlphaBetaParams params;
    StoppingRule stop;
    bool operator==(const SolveMapTask&) const = default;
};

struct SolveFredholmTask {
    std::string kernel;
    double m = 0.0;
    double n = 1.0;
    std::size_t intervals = 1000;
    QuadratureKind quadrature = QuadratureKind::trapezoid;
    std::optional<double> lipschitz;
    std::optional<double> x0;  // constant initial function; zero when absent
    StoppingRule stop;
    bool operator==(const SolveFredholmTask&) const = default;
};

struct SolveOdeTask {
    std::string rhs;
    double s0 = 0.0;
    double r0 = 0.0;
    double h = 0.5;
    std::size_t nodes_per_side = 500;
    std::optional<double> lipschitz;
    StoppingRule stop;
    bool operator==(const SolveOdeTask&) const = default;
};

using Task = std::variant<VerifyMetricTask, ClassifyTask, EstimateContractionTask, SolveMapTask,
                          SolveFredholmTask, SolveOdeTask>;

inline constexpr std::array<std::string_view, 6> task_names{
    "verify-metric", "classify", "estimate-contraction", "solve-map", "solve-fredholm", "solve-ode"};

inline std::string_view task_name(const Task& t) { return task_names[t.index()]; }

struct OutputPaths {
    std::string summary = "summary.json";
    std::string trace = "trace.csv";
    std::string solution = "solution.csv";
    bool operator==(const OutputPaths&) const = default;
};

struct ProblemFile {
    std::string version{format_version};
    std::uint64_t seed = 0;
    OutputPaths outputs;
    Task task;
    bool operator==(const ProblemFile&) const = default;
};

// Built-in identifiers; extension happens here, not through expressions.
inline constexpr std::array<std::string_view, 3> builtin_maps{"x/4", "identity", "zero"};
inline constexpr std::array<std::string_view, 3> builtin_scalar_spaces{"abs", "abs-squared", "sup-grid"};
inline constexpr std::array<std::string_view, 3> builtin_kernels{"fredholm-linear", "quarter-u", "zero"};
inline constexpr std::array<std::string_view, 3> builtin_rhs{"ode-decay", "ode-poly", "zero"};

namespace detail {

template <std::size_t N>
bool one_of(const std::array<std::string_view, N>& names, std::string_view s) {
    return std::find(names.begin(), names.end(), s) != names.end();
}

template <std::size_t N>
std::string join(const std::array<std::string_view, N>& names) {
    std::string out;
    for (auto n : names) out += (out.empty() ? "" : ", ") + std::string(n);
    return out;
}

// Field accessors with the dotted path in every error.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(label(), "must be an object");
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        for (const auto& [k, _] : j_.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                throw ValidationError(field(k), "unknown field");
    }

    bool has(std::string_view k) const { return j_.contains(std::string(k)); }

    const json& at(std::string_view k) const {
        if (!has(k)) throw ValidationError(field(k), "required field missing");
        return j_.at(std::string(k));
    }

    Reader object(std::string_view k) const { return Reader(at(k), field(k)); }

    double number(std::string_view k) const {
        const auto& v = at(k);
        if (!v.is_number()) throw ValidationError(field(k), "must be a number");
        return v.get<double>();
    }
    double number_or(std::string_view k, double dflt) const { return has(k) ? number(k) : dflt; }
    std::optional<double> optional_number(std::string_view k) const {
        return has(k) ? std::optional<double>(number(k)) : std::nullopt;
    }

    std::uint64_t count(std::string_view k) const {
        const auto& v = at(k);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ValidationError(field(k), "must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    std::uint64_t count_or(std::string_view k, std::uint64_t dflt) const { return has(k) ? count(k) : dflt; }

    std::string string(std::string_view k) const {
        const auto& v = at(k);
        if (!v.is_string()) throw ValidationError(field(k), "must be a string");
        return v.get<std::string>();
    }
    std::string string_or(std::string_view k, std::string dflt) const { return has(k) ? string(k) : dflt; }

    bool boolean_or(std::string_view k, bool dflt) const {
        if (!has(k)) return dflt;
        const auto& v = at(k);
        if (!v.is_boolean()) throw ValidationError(field(k), "must be a boolean");
        return v.get<bool>();
    }

    std::vector<double> numbers(std::string_view k) const {
        const auto& v = at(k);
        if (!v.is_array()) throw ValidationError(field(k), "must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ValidationError(field(k), "must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::string field(std::string_view k) const {
        return path_.empty() ? std::string(k) : path_ + "." + std::string(k);
    }
    const std::string& label() const { return path_.empty() ? root_label_ : path_; }

private:
    const json& j_;
    std::string path_;
    std::string root_label_ = "problem";
};

inline void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw ValidationError(field, constraint);
}

inline void require_finite(double v, const std::string& field) {
    require(std::isfinite(v), field, "must be finite");
}

inline DomainSpec read_domain(const Reader& r) {
    r.allow_only({"interval", "points", "grid"});
    DomainSpec d;
    int present = 0;
    if (r.has("interval")) {
        ++present;
        const auto v = r.numbers("interval");
        require(v.size() == 2, r.field("interval"), "must hold exactly [lower, upper]");
        require(std::isfinite(v[0]) && std::isfinite(v[1]) && v[0] <= v[1], r.field("interval"),
                "must satisfy lower <= upper");
        d.interval = std::array<double, 2>{v[0], v[1]};
    }
    if (r.has("points")) {
        ++present;
        auto v = r.numbers("points");
        require(!v.empty(), r.field("points"), "must not be empty");
        d.points = std::move(v);
    }
    if (r.has("grid")) {
        ++present;
        const auto g = r.object("grid");
        g.allow_only({"lower", "upper", "intervals", "radius"});
        GridSpec gs{g.number("lower"), g.number("upper"), g.count("intervals"), g.number_or("radius", 1.0)};
        require(std::isfinite(gs.lower) && std::isfinite(gs.upper) && gs.lower < gs.upper,
                g.field("lower"), "must satisfy lower < upper");
        require(gs.intervals >= 1, g.field("intervals"), "must be >= 1");
        require(gs.radius > 0.0, g.field("radius"), "must be > 0");
        d.grid = gs;
    }
    require(present == 1, r.label(), "exactly one of interval, points, grid is required");
    return d;
}

inline AlphaBetaParams read_params(const Reader& r) {
    AlphaBetaParams p{r.number_or("alpha", 1.0), r.number_or("beta", 1.0)};
    require(std::isfinite(p.alpha) && p.alpha >= 1.0, r.field("alpha"), "α must be >= 1");
    require(std::isfinite(p.beta) && p.beta >= 1.0, r.field("beta"), "β must be >= 1");
    return p;
}

inline StoppingRule read_stop(const Reader& r) {
    StoppingRule s;
    s.tol = r.number_or("tol", s.tol);
    s.max_iter = r.count_or("max_iter", s.max_iter);
    const auto mode = r.string_or("mode", std::string(to_string(s.mode)));
    if (mode == "a-posteriori") s.mode = StopMode::a_posteriori;
    else if (mode == "a-priori-if-available") s.mode = StopMode::a_priori_if_available;
    else throw ValidationError(r.field("mode"), "must be a-posteriori or a-priori-if-available");
    require(s.tol > 0.0, r.field("tol"), "tol must be > 0");
    require(s.max_iter >= 1, r.field("max_iter"), "must be >= 1");
    return s;
}

inline ContractionSpec read_contraction(const Reader& r) {
    const auto kind_name = r.string("kind");
    const auto kind = parse_contraction_kind(kind_name);
    if (!kind)
        throw ValidationError(r.field("kind"),
                              "must be banach, alpha-beta, weak-alpha-beta, kannan or reich");
    ContractionSpec spec;
    switch (*kind) {
    case ContractionKind::banach:
        r.allow_only({"kind", "K"});
        spec = Banach{r.number("K")};
        break;
    case ContractionKind::alpha_beta:
        r.allow_only({"kind", "xi1", "xi2"});
        spec = AlphaBeta{r.number("xi1"), r.number("xi2")};
        break;
    case ContractionKind::weak_alpha_beta:
        r.allow_only({"kind", "xi1", "xi2"});
        spec = WeakAlphaBeta{r.number("xi1"), r.number("xi2")};
        break;
    case ContractionKind::kannan:
        r.allow_only({"kind", "lambda"});
        spec = Kannan{r.number("lambda")};
        break;
    case ContractionKind::reich:
        r.allow_only({"kind", "xi1", "xi2", "xi3"});
        spec = Reich{r.number("xi1"), r.number("xi2"), r.number("xi3")};
        break;
    }
    try {
        validate(spec);
    } catch (const ContractError& e) {
        throw ValidationError(r.label(), e.what());
    }
    return spec;
}

inline void check_space_domain(const std::string& space, const DomainSpec& d, const std::string& field) {
    require(one_of(builtin_scalar_spaces, space), field, "must be one of " + join(builtin_scalar_spaces));
    if (space == "sup-grid") require(d.grid.has_value(), field, "sup-grid needs a grid domain");
    else require(!d.grid.has_value(), field, space + " needs an interval or points domain");
}

inline std::size_t positive_count(const Reader& r, std::string_view k, std::size_t dflt) {
    const auto v = r.count_or(k, dflt);
    require(v >= 1, r.field(k), "must be >= 1");
    return v;
}

inline Task read_task(std::string_view name, const Reader& r) {
    if (name == "verify-metric") {
        r.allow_only({"space", "domain", "alpha", "beta", "n_triples", "exhaustive", "witnesses"});
        VerifyMetricTask t;
        t.space = r.string("space");
        t.domain = read_domain(r.object("domain"));
        check_space_domain(t.space, t.domain, r.field("space"));
        t.params = read_params(r);
        t.n_triples = positive_count(r, "n_triples", t.n_triples);
        t.exhaustive = r.boolean_or("exhaustive", false);
        require(!t.exhaustive || t.domain.points, r.field("exhaustive"), "needs a points domain");
        if (r.has("witnesses")) {
            require(t.space != "sup-grid", r.field("witnesses"), "only scalar spaces take witnesses");
            const auto& w = r.at("witnesses");
            require(w.is_array(), r.field("witnesses"), "must be an array of [x, y, z] triples");
            for (const auto& e : w) {
                require(e.is_array() && e.size() == 3 &&
                            std::all_of(e.begin(), e.end(), [](const json& v) { return v.is_number(); }),
                        r.field("witnesses"), "must be an array of [x, y, z] triples");
                t.witnesses.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
            }
        }
        return t;
    }
    if (name == "classify") {
        r.allow_only({"space", "domain", "n_triples", "exhaustive", "alphas"});
        ClassifyTask t;
        t.space = r.string("space");
        t.domain = read_domain(r.object("domain"));
        check_space_domain(t.space, t.domain, r.field("space"));
        t.n_triples = positive_count(r, "n_triples", t.n_triples);
        t.exhaustive = r.boolean_or("exhaustive", false);
        require(!t.exhaustive || t.domain.points, r.field("exhaustive"), "needs a points domain");
        if (r.has("alphas")) {
            t.alphas = r.numbers("alphas");
            require(!t.alphas.empty() && std::all_of(t.alphas.begin(), t.alphas.end(),
                                                      [](double a) { return a >= 1.0 && std::isfinite(a); }),
                    r.field("alphas"), "must be a nonempty list of values >= 1");
        }
        return t;
    }
    if (name == "estimate-contraction") {
        r.allow_only({"map", "space", "domain", "kind", "n_pairs"});
        EstimateContractionTask t;
        t.map = r.string("map");
        require(one_of(builtin_maps, t.map), r.field("map"), "must be one of " + join(builtin_maps));
        t.space = r.string_or("space", t.space);
        t.domain = read_domain(r.object("domain"));
        require(t.space != "sup-grid", r.field("space"), "maps act on scalar spaces");
        check_space_domain(t.space, t.domain, r.field("space"));
        const auto kind = parse_contraction_kind(r.string("kind"));
        require(kind.has_value(), r.field("kind"),
                "must be banach, alpha-beta, weak-alpha-beta, kannan or reich");
        t.kind = *kind;
        t.n_pairs = positive_count(r, "n_pairs", t.n_pairs);
        return t;
    }
    if (name == "solve-map") {
        r.allow_only({"map", "space", "domain", "x0", "contraction", "alpha", "beta", "tol", "max_iter", "mode"});
        SolveMapTask t;
        t.map = r.string("map");
        require(one_of(builtin_maps, t.map), r.field("map"), "must be one of " + join(builtin_maps));
        t.space = r.string_or("space", t.space);
        t.domain = read_domain(r.object("domain"));
        require(t.space != "sup-grid", r.field("space"), "maps act on scalar spaces");
        check_space_domain(t.space, t.domain, r.field("space"));
        t.x0 = r.number("x0");
        require_finite(t.x0, r.field("x0"));
        t.contraction = read_contraction(r.object("contraction"));
        t.params = read_params(r);
        t.stop = read_stop(r);
        return t;
    }
    if (name == "solve-fredholm") {
        r.allow_only({"kernel", "m", "n", "M", "quadrature", "lipschitz", "x0", "tol", "max_iter", "mode"});
        SolveFredholmTask t;
        t.kernel = r.string("kernel");
        require(one_of(builtin_kernels, t.kernel), r.field("kernel"), "must be one of " + join(builtin_kernels));
        t.m = r.number("m");
        t.n = r.number("n");
        require(std::isfinite(t.m) && std::isfinite(t.n) && t.m < t.n, r.field("m"), "m < n required");
        t.intervals = positive_count(r, "M", t.intervals);
        const auto q = r.string_or("quadrature", "trapezoid");
        if (q == "trapezoid") t.quadrature = QuadratureKind::trapezoid;
        else if (q == "simpson") t.quadrature = QuadratureKind::simpson;
        else throw ValidationError(r.field("quadrature"), "must be trapezoid or simpson");
        require(t.quadrature != QuadratureKind::simpson || t.intervals % 2 == 0, r.field("M"),
                "Simpson needs an even M");
        t.lipschitz = r.optional_number("lipschitz");
        require(!t.lipschitz || *t.lipschitz > 0.0, r.field("lipschitz"), "Λ must be > 0");
        t.x0 = r.optional_number("x0");
        require(!t.x0 || std::isfinite(*t.x0), r.field("x0"), "must be finite");
        t.stop = read_stop(r);
        return t;
    }
    // solve-ode
    r.allow_only({"rhs", "s0", "r0", "h", "nodes_per_side", "lipschitz", "tol", "max_iter", "mode"});
    SolveOdeTask t;
    t.rhs = r.string("rhs");
    require(one_of(builtin_rhs, t.rhs), r.field("rhs"), "must be one of " + join(builtin_rhs));
    t.s0 = r.number("s0");
    t.r0 = r.number("r0");
    require_finite(t.s0, r.field("s0"));
    require_finite(t.r0, r.field("r0"));
    t.h = r.number("h");
    require(std::isfinite(t.h) && t.h > 0.0, r.field("h"), "h must be > 0");
    t.nodes_per_side = positive_count(r, "nodes_per_side", t.nodes_per_side);
    t.lipschitz = r.optional_number("lipschitz");
    require(!t.lipschitz || *t.lipschitz > 0.0, r.field("lipschitz"), "Λ must be > 0");
    t.stop = read_stop(r);
    return t;
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

} // namespace detail

/// Validates an already-parsed JSON document.
inline ProblemFile problem_from_json(const json& j) {
    const detail::Reader r(j, "");
    std::vector<std::string_view> allowed{"version", "seed", "outputs", "task"};
    allowed.insert(allowed.end(), task_names.begin(), task_names.end());
    for (const auto& [k, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ValidationError(k, "unknown field");

    ProblemFile p;
    p.version = r.string("version");
    detail::require(p.version == format_version, "version",
                    "unsupported version, expected \"" + std::string(format_version) + "\"");
    p.seed = r.count_or("seed", 0);
    if (r.has("outputs")) {
        const auto o = r.object("outputs");
        o.allow_only({"summary", "trace", "solution"});
        p.outputs.summary = o.string_or("summary", p.outputs.summary);
        p.outputs.trace = o.string_or("trace", p.outputs.trace);
        p.outputs.solution = o.string_or("solution", p.outputs.solution);
    }

    std::vector<std::string_view> blocks;
    for (auto name : task_names)
        if (r.has(name)) blocks.push_back(name);
    detail::require(blocks.size() == 1, "task",
                    "exactly one task block is required, found " + std::to_string(blocks.size()));
    const auto task = r.string("task");
    detail::require(task == blocks.front(), "task",
                    "names \"" + task + "\" but the task block is \"" + std::string(blocks.front()) + "\"");
    p.task = detail::read_task(blocks.front(), r.object(blocks.front()));
    return p;
}

/// Parses problem-file text; syntax errors carry the line number.
inline ProblemFile parse_problem_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto line = detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
    }
    return problem_from_json(j);
}

inline ProblemFile parse_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read problem file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

// --- serialization ------------------------------------------------------

inline json to_json(const DomainSpec& d) {
    json j = json::object();
    if (d.interval) j["interval"] = {(*d.interval)[0], (*d.interval)[1]};
    if (d.points) j["points"] = *d.points;
    if (d.grid)
        j["grid"] = {{"lower", d.grid->lower}, {"upper", d.grid->upper},
                     {"intervals", d.grid->intervals}, {"radius", d.grid->radius}};
    return j;
}

inline json to_json(const ContractionSpec& spec) {
    return std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Banach>) return {{"kind", "banach"}, {"K", c.k}};
            else if constexpr (std::is_same_v<T, AlphaBeta>)
                return {{"kind", "alpha-beta"}, {"xi1", c.xi1}, {"xi2", c.xi2}};
            else if constexpr (std::is_same_v<T, WeakAlphaBeta>)
                return {{"kind", "weak-alpha-beta"}, {"xi1", c.xi1}, {"xi2", c.xi2}};
            else if constexpr (std::is_same_v<T, Kannan>) return {{"kind", "kannan"}, {"lambda", c.lambda}};
            else return {{"kind", "reich"}, {"xi1", c.xi1}, {"xi2", c.xi2}, {"xi3", c.xi3}};
        },
        spec);
}

namespace detail {

inline void put_stop(json& j, const StoppingRule& s) {
    j["tol"] = s.tol;
    j["max_iter"] = s.max_iter;
    j["mode"] = std::string(to_string(s.mode));
}

} // namespace detail

/// The task block exactly as a problem file would carry it.
inline json task_to_json(const Task& task) {
    return std::visit(
        [](const auto& t) -> json {
            using T = std::decay_t<decltype(t)>;
            json j = json::object();
            if constexpr (std::is_same_v<T, VerifyMetricTask>) {
                j = {{"space", t.space}, {"domain", to_json(t.domain)}, {"alpha", t.params.alpha},
                     {"beta", t.params.beta}, {"n_triples", t.n_triples}, {"exhaustive", t.exhaustive}};
                if (!t.witnesses.empty()) j["witnesses"] = t.witnesses;
            } else if constexpr (std::is_same_v<T, ClassifyTask>) {
                j = {{"space", t.space}, {"domain", to_json(t.domain)}, {"n_triples", t.n_triples},
                     {"exhaustive", t.exhaustive}, {"alphas", t.alphas}};
            } else if constexpr (std::is_same_v<T, EstimateContractionTask>) {
                j = {{"map", t.map}, {"space", t.space}, {"domain", to_json(t.domain)},
                     {"kind", std::string(to_string(t.kind))}, {"n_pairs", t.n_pairs}};
            } else if constexpr (std::is_same_v<T, SolveMapTask>) {
                j = {{"map", t.map}, {"space", t.space}, {"domain", to_json(t.domain)}, {"x0", t.x0},
                     {"contraction", to_json(t.contraction)}, {"alpha", t.params.alpha},
                     {"beta", t.params.beta}};
                detail::put_stop(j, t.stop);
            } else if constexpr (std::is_same_v<T, SolveFredholmTask>) {
                j = {{"kernel", t.kernel}, {"m", t.m}, {"n", t.n}, {"M", t.intervals},
                     {"quadrature", std::string(to_string(t.quadrature))}};
                if (t.lipschitz) j["lipschitz"] = *t.lipschitz;
                if (t.x0) j["x0"] = *t.x0;
                detail::put_stop(j, t.stop);
            } else {
                j = {{"rhs", t.rhs}, {"s0", t.s0}, {"r0", t.r0}, {"h", t.h},
                     {"nodes_per_side", t.nodes_per_side}};
                if (t.lipschitz) j["lipschitz"] = *t.lipschitz;
                detail::put_stop(j, t.stop);
            }
            return j;
        },
        task);
}

inline json to_json(const ProblemFile& p) {
    json j = {{"version", p.version},
              {"seed", p.seed},
              {"outputs",
               {{"summary", p.outputs.summary}, {"trace", p.outputs.trace}, {"solution", p.outputs.solution}}},
              {"task", std::string(task_name(p.task))}};
    j[std::string(task_name(p.task))] = task_to_json(p.task);
    return j;
}

} // namespace abfix::cli
