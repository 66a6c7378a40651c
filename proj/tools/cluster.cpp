#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dwmtj/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
};

dwmtj::ExperimentConfig load(const CommonArgs& args) {
    dwmtj::ExperimentConfig cfg = dwmtj::load_experiment_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Override the config seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "Override the output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DW-MTJ crossbar clustering experiments"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment from a config");
    add_common(run_cmd, run_args);

    CommonArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run the config's N_HL sweep");
    add_common(sweep_cmd, sweep_args);

    CLI11_PARSE(app, argc, argv);

    const bool is_run = run_cmd->parsed();
    const CommonArgs& args = is_run ? run_args : sweep_args;
    std::string stage = "config";
    try {
        const dwmtj::ExperimentConfig cfg = load(args);
        stage = is_run ? "run" : "sweep";
        if (is_run) {
            dwmtj::run_experiment(cfg);
        } else {
            dwmtj::run_sweep(cfg);
        }
        std::cout << "wrote " << (cfg.output_dir / "metrics.csv").string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "cluster " << stage << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
