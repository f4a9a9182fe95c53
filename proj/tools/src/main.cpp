#include <CLI11.hpp>

#include <iostream>

#include "fracdamp/harness.hpp"

int main(int argc, char** argv) {
    using namespace fracdamp::harness;

    CLI::App app{"Degenerate Schrodinger system with fractional boundary damping"};
    std::string command;
    std::string config;
    std::string out = ".";
    std::string trace;
    std::vector<std::string> overrides;
    app.add_option("command", command, "simulate | spectrum | resolvent | validate-kernel | fit-decay | sweep")
        ->required();
    app.add_option("--config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory");
    app.add_option("--set", overrides, "override, e.g. model.alpha_frac=0.75")->take_all();
    app.add_option("--trace", trace, "fit-decay: fit an existing energy_trace.csv instead of simulating");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto cmd = parse_command(command);
    if (!cmd) {
        std::cerr << "unknown command '" << command << "'\n" << app.help();
        return 2;
    }
    ExperimentSpec spec;
    spec.command = *cmd;
    spec.config_path = config;
    spec.out_dir = out;
    spec.overrides = overrides;
    if (!trace.empty()) spec.trace_path = trace;
    return run_command(spec).exit_code;
}
