#include "abfix/cli/problem.hpp"
#include "abfix/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace abfix;

    CLI::App app{"abfix: fixed-point solvers on (alpha,beta)-metric spaces"};
    app.require_subcommand(1);

    std::string file;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool strict = false;

    auto* run_cmd = app.add_subcommand("run", "Run the task described by a problem file");
    run_cmd->add_option("file", file, "Problem file (JSON)")->required();
    run_cmd->add_option("--seed", seed, "Override the file's seed");
    run_cmd->add_option("--out-dir", out_dir, "Directory for summary / trace / solution files");
    auto* strict_flag = run_cmd->add_flag("--strict", strict, "Refuse solves whose contraction factor is >= 1");
    run_cmd->add_flag("--best-effort", "Warn and iterate anyway when the factor is >= 1 (default)")
        ->excludes(strict_flag);

    app.add_subcommand("schema", "Print the problem-file JSON schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::exit_usage;
    }

    if (app.got_subcommand("schema")) {
        std::cout << cli::problem_schema();
        return cli::exit_ok;
    }

    cli::ProblemFile problem;
    try {
        problem = cli::parse_problem_file(file);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return cli::exit_validation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return cli::exit_validation;
    }

    try {
        const auto outcome = cli::run(problem, {out_dir, strict, seed});
        if (outcome.exit_code != cli::exit_ok) std::cerr << "error: " << outcome.message << "\n";
        else std::cout << cli::summary_text(outcome.summary);
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_usage;
    }
}
