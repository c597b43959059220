#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkae/error.hpp"
#include "gkae/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment config (defaults when omitted)");
    cmd->add_option("--seed", args.seed, "replace the config seed list with this single seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--override", args.overrides, "dotted config override, e.g. train.epochs=50")
        ->take_all();
}

int run(gkae::Task task, const CommonArgs& args) {
    gkae::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = gkae::load_config(args.config_path);
    cfg.task = task;
    for (const std::string& o : args.overrides) gkae::apply_override(cfg, o);
    if (args.seed_set) cfg.seeds = {args.seed};
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;

    const gkae::MetricsReport report = gkae::run_experiment(cfg);
    std::cout << "task " << report.task << " finished in " << report.runtime_seconds << " s\n";
    for (const auto& [name, value] : report.aggregates)
        std::cout << "  " << name << " = " << value << '\n';
    std::cout << "report: " << cfg.out_dir << "/report.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koopman latent dynamics for time-varying graph signals"};
    app.require_subcommand(1);

    CommonArgs args;
    const std::pair<const char*, gkae::Task> subcommands[] = {
        {"simulate", gkae::Task::Simulate}, {"train", gkae::Task::Train},
        {"predict", gkae::Task::Predict},   {"reconstruct", gkae::Task::Reconstruct},
        {"baseline", gkae::Task::Baseline}, {"eval", gkae::Task::Eval},
    };
    for (auto [name, task] : subcommands) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, args);
        cmd->callback([&args, task = task]() {
            if (run(task, args) != 0) throw CLI::RuntimeError(1);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const gkae::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
