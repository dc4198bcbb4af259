#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "polariton/cli.hpp"

int main(int argc, char** argv) {
    namespace pc = polariton::cli;
    CLI::App app{"Steady-state and two-time correlations of the qubit-SMR-QD polariton system"};
    app.require_subcommand(1);

    pc::Invocation inv;
    std::string config, preset, out, format;
    int threads = 0;
    const std::pair<const char*, const char*> commands[] = {
        {"g2sweep", "equal-time g2/g3/g4 and case labels over a parameter sweep"},
        {"g2tau", "delay-time g2(tau) curves and dynamics labels at fixed points"},
        {"spectrum", "manifold levels versus the QD frequency, optional resonance distances"},
        {"oracle-compare", "master equation against the weak-drive amplitudes"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--preset", preset, "preset A1, A2 or A3 (replaces any bundle)");
        sub->add_option("--override", inv.overrides, "KEY=VALUE with a dotted key, repeatable");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "worker threads (default: POLARITON_THREADS, then 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "data format")->check(CLI::IsMember({"csv", "json"}));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pc::exit_config_error;
    }
    inv.command = app.get_subcommands().front()->get_name();
    if (!config.empty()) inv.config_path = config;
    if (!preset.empty()) inv.preset = preset;
    if (!out.empty()) inv.out_dir = out;
    if (!format.empty()) inv.format = format;
    if (threads > 0) inv.threads = threads;
    return pc::run(inv, std::cerr);
}
