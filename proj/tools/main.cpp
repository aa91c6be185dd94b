#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nussim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Distributed adaptive output-consensus simulator for agents with "
                 "unknown control directions"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    double dt = 0.0;
    double duration = 0.0;
    std::string nussbaum;

    CLI::App* run = app.add_subcommand("run", "Simulate a scenario file and write results");
    run->add_option("scenario", scenario_path, "Scenario document (JSON, comments allowed)")
        ->required();
    run->add_option("-o,--output-dir", out_dir, "Output directory (default: out/<name>)");
    run->add_option("--dt", dt, "Override integration step (s)");
    run->add_option("--duration", duration, "Override horizon T (s)");
    run->add_option("--nussbaum", nussbaum, "Override gain function: k2sin | k2cos | expk2cos");

    CLI::App* check = app.add_subcommand("check", "Validate a scenario and report hypotheses");
    check->add_option("scenario", scenario_path, "Scenario document")->required();

    app.add_subcommand("list-models", "Print the agent model catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nussim::cli::kExitInvalid;
    }

    try {
        if (run->parsed()) {
            nussim::cli::RunOverrides overrides;
            if (run->count("--dt") > 0) overrides.h = dt;
            if (run->count("--duration") > 0) overrides.duration = duration;
            if (run->count("--nussbaum") > 0) {
                try {
                    overrides.nussbaum = nussim::control::nussbaum_kind_from_id(nussbaum);
                } catch (const std::invalid_argument& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    return nussim::cli::kExitInvalid;
                }
            }
            return nussim::cli::run_file(scenario_path, out_dir, overrides, std::cout);
        }
        if (check->parsed()) return nussim::cli::check_file(scenario_path, std::cout);
        std::cout << nussim::cli::list_models_text();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nussim::cli::kExitInvalid;
    }
}
