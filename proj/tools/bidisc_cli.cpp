// bidisc <command> <input.json>... [--tol T] [--grid SPEC] [--seed N] [--out FILE]
//
// Prints the JSON report (or writes it to --out) and a one-line verdict on stderr.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <bidisc/cli.hpp>

int main(int argc, char** argv) {
    bidisc::cli::Command cmd;
    cmd.tol = bidisc::cli::default_tol();
    std::string out;
    std::string grid;
    std::string at;

    CLI::App app{"Schur and inner functions on the bidisc: realizations, certificates, kernels, factorization"};
    app.add_option("command", cmd.name, "operation to run")
        ->required()
        ->check(CLI::IsMember(bidisc::cli::command_names()));
    app.add_option("inputs", cmd.inputs, "input JSON files");
    app.add_option("--tol", cmd.tol, "tolerance (default 1e-9, or BIDISC_SCHUR_TOL)")->check(CLI::PositiveNumber);
    app.add_option("--grid", grid, "torus2:N, product:AxB, <ambient>:rand:N[:seed=S] or @grid.json");
    app.add_option("--seed", cmd.seed, "seed for random grids without an explicit seed");
    app.add_option("--out", out, "write the report here instead of stdout");
    app.add_option("--at", at, "eval: a point as JSON, e.g. [[0,0],[0,0]]");
    app.add_option("--var", cmd.variable, "strip: which variable (1 or 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!grid.empty()) {
        cmd.grid = grid;
    }
    if (!at.empty()) {
        cmd.at = at;
    }

    const auto outcome = bidisc::cli::run(cmd);
    const std::string text = outcome.report.dump() + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << cmd.name << ": cannot write " << out << "\n";
            return 2;
        }
        f << text;
    }
    std::cerr << cmd.name << ": " << outcome.report["verdict"].get<std::string>() << "\n";
    return outcome.exit_code;
}
