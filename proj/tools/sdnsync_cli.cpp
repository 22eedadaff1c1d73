#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdnsync/config.hpp"
#include "sdnsync/harness.hpp"

using namespace sdnsync;

namespace {

struct Common {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::string policy;
    int checkpoint_every = -1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON experiment config");
    cmd->add_option("--seed,--seeds", c.seeds, "Replica seed(s), comma separated")->delimiter(',');
    cmd->add_option("--out", c.out, "Output directory (or file for generate-topology)");
    cmd->add_option("--policy", c.policy, "ddrl, round_robin or random");
    cmd->add_option("--checkpoint-every", c.checkpoint_every, "Write a checkpoint every n episodes");
    cmd->add_option("--set", c.overrides, "Override a config value, section.key=value");
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    for (const auto& o : c.overrides) apply_override(cfg, o);
    if (!c.seeds.empty()) cfg.run.seeds = c.seeds;
    if (!c.out.empty()) cfg.run.out_dir = c.out;
    if (!c.policy.empty()) cfg.run.policies = {policy_from_string(c.policy)};
    if (c.checkpoint_every >= 0) cfg.run.checkpoint_every = c.checkpoint_every;
    cfg.validate();
    return cfg;
}

void print_summary(const std::vector<PolicySummary>& rows, AppKind app) {
    write_summary_csv(std::cout, rows, app);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint controller synchronization and placement"};
    app.require_subcommand(1);

    Common gen_c, train_c, eval_c, cmp_c, sweep_c, desc_c;

    auto* gen = app.add_subcommand("generate-topology", "Draw a topology and write it as JSON");
    add_common(gen, gen_c);

    auto* train = app.add_subcommand("train", "Train DDRL agents, one per seed");
    add_common(train, train_c);

    auto* eval = app.add_subcommand("evaluate", "Evaluate a checkpoint or a baseline on the evaluation episodes");
    add_common(eval, eval_c);
    std::string checkpoint;
    eval->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate (ddrl)");

    auto* cmp = app.add_subcommand("compare", "Train and evaluate every configured policy and summarize");
    add_common(cmp, cmp_c);

    auto* sweep = app.add_subcommand("sweep", "Repeat the comparison along one parameter");
    add_common(sweep, sweep_c);
    std::string param;
    std::vector<double> values;
    sweep->add_option("--param", param, "tau, budget_fraction or num_domains")->required();
    sweep->add_option("--values", values, "Comma separated values")->delimiter(',')->required();

    auto* desc = app.add_subcommand("describe-actions", "Print the flat action ordering");
    add_common(desc, desc_c);
    std::string topology_file;
    desc->add_option("--topology", topology_file, "Topology JSON instead of a generated one");
    bool show_order = false;
    desc->add_flag("--header", show_order, "Print the ordering rule first");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto cfg = resolve(gen_c);
            const std::string out = gen_c.out.empty() ? "topology.json" : gen_c.out;
            save_topology(replica_topology(cfg, cfg.run.seeds.front()), out);
            std::cout << "wrote " << out << '\n';
        } else if (*train) {
            auto cfg = resolve(train_c);
            cfg.run.policies = {PolicyKind::Ddrl};
            ReplicaOptions opts;
            opts.checkpoint_dir = cfg.run.out_dir;
            opts.checkpoint_every = cfg.run.checkpoint_every;
            const auto res = run_experiment(cfg, cfg.run.out_dir, opts);
            print_summary(res.summary, cfg.application.kind);
        } else if (*eval) {
            auto cfg = resolve(eval_c);
            ReplicaOptions opts;
            opts.load_checkpoint = checkpoint;
            if (cfg.run.policies.size() != 1) cfg.run.policies = {PolicyKind::Ddrl};
            if (cfg.run.policies.front() == PolicyKind::Ddrl && checkpoint.empty())
                throw ConfigError("evaluate: --checkpoint is required for the ddrl policy");
            if (cfg.run.policies.front() != PolicyKind::Ddrl) cfg.agent.episodes = 1;
            const auto res = run_experiment(cfg, cfg.run.out_dir, opts);
            print_summary(res.summary, cfg.application.kind);
        } else if (*cmp) {
            const auto cfg = resolve(cmp_c);
            ReplicaOptions opts;
            opts.checkpoint_dir = cfg.run.out_dir;
            opts.checkpoint_every = cfg.run.checkpoint_every;
            const auto res = run_experiment(cfg, cfg.run.out_dir, opts);
            print_summary(res.summary, cfg.application.kind);
        } else if (*sweep) {
            const auto cfg = resolve(sweep_c);
            const auto points = run_sweep(cfg, param, values, cfg.run.out_dir);
            std::ifstream in(std::filesystem::path(cfg.run.out_dir) / ("sweep_" + param + ".csv"));
            std::cout << in.rdbuf();
        } else if (*desc) {
            const auto cfg = resolve(desc_c);
            const Topology topo =
                topology_file.empty() ? replica_topology(cfg, cfg.run.seeds.front()) : load_topology(topology_file);
            const auto env = make_env(cfg, topo);
            if (show_order) std::cout << kActionOrder << '\n';
            describe_actions(std::cout, env.actions());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
