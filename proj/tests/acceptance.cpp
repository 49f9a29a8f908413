// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "abfix/abfix.hpp"
#include "abfix/cli/problem.hpp"
#include "abfix/cli/run.hpp"
#include "property_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace abfix;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
    void note(const std::string& what) { notes.push_back(what); }
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) { return describe(v); }

Check ac1_trace() {
    Check c;
    auto space = abs_space(interval_domain(0.0, 1.0));
    space.params = {2.0, 1.0};
    const SelfMap<double> quarter = [](const double& x) { return x / 4.0; };
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = picard(quarter, space, 1.0, Banach{0.25}, {1e-12, 10000});
    const double ms = elapsed_ms(t0);
    c.require(r.trace.size() > 3 && r.trace[1] == 0.25 && r.trace[2] == 0.0625 && r.trace[3] == 0.015625,
              "first iterates are not 0.25, 0.0625, 0.015625");
    c.require(r.termination == Termination::converged && r.final_residual() < 1e-12,
              "did not converge below 1e-12");
    c.require(r.n_iter <= 25, "took " + std::to_string(r.n_iter) + " iterations");
    c.require(ms < 10.0, "runtime " + num(ms) + " ms");
    c.note("n_iter=" + std::to_string(r.n_iter) + " runtime_ms=" + num(ms));
    return c;
}

Check ac2_counterexample() {
    Check c;
    const auto space = abs_squared_space(interval_domain(-10.0, 10.0));
    const std::vector<Triple<double>> witness{{0.0, 2.0, 1.0}};
    const auto at11 = verify_axioms(space, {1, 1}, 11, 10000, std::span<const Triple<double>>(witness));
    bool found = false;
    for (const auto& v : at11.violations)
        found |= v.axiom == Axiom::triangle && v.witness == std::vector<double>{0, 2, 1} && v.lhs == 4.0 &&
                 v.rhs == 2.0;
    c.require(!at11.passed && found, "witness (0,2,1) not reported with lhs 4, rhs 2 at (1,1)");
    for (AlphaBetaParams p : {AlphaBetaParams{2, 2}, AlphaBetaParams{2.5, 2.5}})
        c.require(verify_axioms(space, p, 11, 10000, std::span<const Triple<double>>(witness)).passed,
                  "fails at (" + num(p.alpha) + ", " + num(p.beta) + ")");
    const std::vector<double> pts{0.0, 1.0, 2.0};
    const auto grid_space = abs_squared_space(point_domain(pts));
    const auto all = enumerate_triples(std::span<const double>(pts));
    const double s = estimate_min_symmetric_constant(grid_space, std::span<const Triple<double>>(all)).value;
    c.require(s == 2.0, "S over {0,1,2} = " + num(s));
    return c;
}

Check ac3_rates() {
    Check c;
    c.require(std::abs(derived_rate(Kannan{0.3}) - 3.0 / 7.0) <= 1e-15, "kannan 0.3");
    c.require(std::abs(derived_rate(Reich{0.2, 0.3, 0.4}) - 5.0 / 6.0) <= 1e-15, "reich (0.2,0.3,0.4)");
    c.require(std::abs(derived_rate(AlphaBeta{0.25, 0.0}) - 0.25) <= 1e-15, "alpha-beta (0.25,0)");
    const auto o = props::derived_rate_below_one(3, 100000);
    c.require(o.failures == 0, o.first_failure);
    c.note("admissible_specs=" + std::to_string(o.exercised));
    return c;
}

Check ac4_bounds() {
    Check c;
    auto space = abs_space(interval_domain(0.0, 1.0));
    space.params = {2.0, 1.0};
    const SelfMap<double> quarter = [](const double& x) { return x / 4.0; };
    const auto r = picard(quarter, space, 1.0, Banach{0.25}, {1e-300, 40});
    c.require(r.bound_available() && r.trace.size() == 41, "expected 40 iterates with bounds");
    if (r.bound_available()) {
        double worst = -1.0;
        for (std::size_t n = 0; n < r.trace.size(); ++n) {
            const double expect = 2.0 * std::pow(0.25, static_cast<double>(n)) * 0.75 / 0.75;
            c.require(std::abs((*r.a_priori_bounds)[n] - expect) <= 1e-12 * std::max(1.0, expect),
                      "bound(" + std::to_string(n) + ") != closed form");
            for (std::size_t m = n + 1; m < r.trace.size(); ++m)
                worst = std::max(worst, std::abs(r.trace[n] - r.trace[m]) - (*r.a_priori_bounds)[n]);
        }
        c.require(worst <= 1e-12, "distance exceeds bound by " + num(worst));
    }
    space.params = {1.0, 4.0};
    const auto u = picard(quarter, space, 1.0, Banach{0.25}, {});
    c.require(!u.bound_available(), "beta*K = 1 still reports a bound");
    c.require(!a_priori_bound({1.0, 5.0}, 0.5, 1.0, 3).has_value(), "a_priori_bound defined for beta*K > 1");
    return c;
}

double fredholm_error(std::size_t intervals, double tol, double* ms = nullptr) {
    const FredholmProblem p{[](double s, double t, double u) { return s + 0.5 * s * t * u; }, 0.0, 1.0,
                            std::nullopt};
    fredholm::SolveOptions o;
    o.intervals = intervals;
    o.stop.tol = tol;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = fredholm::solve(p, o);
    if (ms) *ms = elapsed_ms(t0);
    if (rep.result.termination != Termination::converged) return INFINITY;
    const auto& u = rep.result.fixed_point;
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - 1.2 * u.grid().node(i)));
    return e;
}

Check ac5_fredholm() {
    Check c;
    double ms = 0.0;
    const double e1000 = fredholm_error(1000, 1e-10, &ms);
    c.require(e1000 <= 1e-4, "sup error " + num(e1000));
    c.require(ms < 1000.0, "runtime " + num(ms) + " ms");
    const double ratio = fredholm_error(500, 1e-10) / e1000;
    c.require(ratio >= 3.5 && ratio <= 4.5, "Richardson ratio " + num(ratio));
    c.note("sup_error=" + num(e1000) + " ratio=" + num(ratio) + " runtime_ms=" + num(ms));
    return c;
}

Check ac6_ode() {
    Check c;
    const OdeProblem p{[](double, double u) { return -u; }, 0.0, 1.0, 0.5, std::nullopt};
    ode::SolveOptions o;
    o.nodes_per_side = 500;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = ode::solve_ivp(p, o);
    const double ms = elapsed_ms(t0);
    const auto& u = rep.result.fixed_point;
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - std::exp(-u.grid().node(i))));
    c.require(rep.result.termination == Termination::converged, "did not converge");
    c.require(e <= 1e-4, "sup error " + num(e));
    for (const auto& it : rep.result.trace) c.require(it[500] == 1.0, "u(s0) != r0 on some iterate");
    c.require(ms < 1000.0, "runtime " + num(ms) + " ms");
    c.note("sup_error=" + num(e) + " runtime_ms=" + num(ms));
    return c;
}

Check ac7_properties() {
    Check c;
    const std::pair<const char*, props::Outcome> suites[] = {
        {"axiom-monotonicity", props::axiom_monotonicity(71, 10000)},
        {"estimate-then-verify", props::estimate_then_verify(72, 10000)},
        {"per-step-ratio", props::per_step_ratio(73, 10000)},
        {"two-start-uniqueness", props::two_start_uniqueness(74, 10000)},
    };
    for (const auto& [name, o] : suites) {
        c.require(o.ok(), std::string(name) + ": " +
                              (o.exercised == 0 ? std::string("premise never held") : o.first_failure));
        c.note(std::string(name) + " " + std::to_string(o.exercised) + "/" + std::to_string(o.cases));
    }
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check ac8_determinism() {
    Check c;
    const auto base = fs::temp_directory_path() / "abfix_acceptance";
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(ABFIX_PROBLEMS_DIR))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    c.require(!files.empty(), "no problem files found");
    for (const auto& f : files) {
        const auto problem = cli::parse_problem_file(f.string());
        std::string out[2];
        for (int k = 0; k < 2; ++k) {
            const auto dir = base / std::to_string(k) / f.stem();
            fs::remove_all(dir);
            fs::create_directories(dir);
            cli::run(problem, {dir, false, std::nullopt});
            out[k] = slurp(dir / problem.outputs.summary);
        }
        c.require(!out[0].empty() && out[0] == out[1], f.filename().string() + " summaries differ");
    }
    c.note("instances=" + std::to_string(files.size()));
    return c;
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Check()>> criteria[] = {
        {"AC1 x/4 trace reproduction", ac1_trace},
        {"AC2 |x-y|^2 counterexample", ac2_counterexample},
        {"AC3 derived rate formulas", ac3_rates},
        {"AC4 a priori bound validity", ac4_bounds},
        {"AC5 Fredholm oracle", ac5_fredholm},
        {"AC6 ODE oracle", ac6_ode},
        {"AC7 property suites", ac7_properties},
        {"AC8 determinism", ac8_determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.notes.push_back(std::string("exception: ") + e.what());
        }
        std::string detail;
        for (const auto& n : c.notes) detail += (detail.empty() ? "" : "; ") + n;
        std::printf("%s %s%s%s\n", c.ok ? "PASS" : "FAIL", name, detail.empty() ? "" : " : ", detail.c_str());
        failed += !c.ok;
    }
    return failed == 0 ? 0 : 1;
}
