// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train / eval / sweep / energy-report.

#include <CLI11.hpp>

#include <iostream>

#include "isacspike/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ISAC downlink simulator with a spiking actor-critic trainer"};
    app.require_subcommand(1);

    using namespace isacspike;

    TrainOptions train;
    int train_iters = -1, train_workers = -1;
    double train_pmax = std::numeric_limits<double>::quiet_NaN();
    CLI::App* t = app.add_subcommand("train", "Train an agent and write metrics + checkpoints");
    t->add_option("--config", train.config_path, "Config file (defaults when omitted)");
    t->add_option("--seed", train.seed, "Master seed");
    t->add_option("--agent", train.agent, "spiking | dense")->default_val("spiking");
    t->add_option("--out", train.out_dir, "Output directory")->required();
    t->add_option("--iterations", train_iters, "Override the configured iteration budget");
    t->add_option("--workers", train_workers, "Parallel rollout workers");
    t->add_option("--pmax-dbm", train_pmax, "Override the transmit power budget");

    EvalOptions eval;
    int eval_episodes = -1;
    CLI::App* e = app.add_subcommand("eval", "Evaluate a checkpoint or the random baseline");
    e->add_option("--config", eval.config_path, "Config file");
    e->add_option("--checkpoint", eval.checkpoint_path, "Checkpoint to load");
    e->add_option("--agent", eval.agent, "spiking | dense | random")->default_val("spiking");
    e->add_option("--seed", eval.seed, "Evaluation seed");
    e->add_option("--episodes", eval_episodes, "Episode count");
    e->add_option("--out", eval.out_dir, "Output directory")->required();

    SweepOptions sweep;
    int sweep_iters = -1, sweep_workers = -1;
    std::vector<std::uint64_t> sweep_seeds;
    CLI::App* s = app.add_subcommand("sweep", "Train/evaluate across transmit power budgets");
    s->add_option("--config", sweep.config_path, "Config file");
    s->add_option("--pmax-dbm", sweep.p_max_dbm_list, "Power budgets in dBm")->delimiter(',');
    s->add_option("--seeds", sweep_seeds, "Seeds, one training run each")->delimiter(',');
    s->add_option("--agent", sweep.agent, "spiking | dense")->default_val("spiking");
    s->add_option("--iterations", sweep_iters, "Training iterations per point");
    s->add_option("--workers", sweep_workers, "Parallel rollout workers");
    s->add_option("--out", sweep.out_dir, "Output directory")->required();

    EnergyReportOptions energy;
    CLI::App* g = app.add_subcommand("energy-report", "Aggregate energy from metrics logs");
    g->add_option("--metrics", energy.metrics_paths, "Metrics JSONL files")
        ->required()
        ->delimiter(',');
    g->add_option("--out", energy.out_path, "Optional JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) {
            if (train_iters > 0) train.iterations = train_iters;
            if (train_workers > 0) train.workers = train_workers;
            if (!std::isnan(train_pmax)) train.p_max_dbm = train_pmax;
            return cmd_train(train);
        }
        if (e->parsed()) {
            if (eval_episodes > 0) eval.episodes = eval_episodes;
            return cmd_eval(eval);
        }
        if (s->parsed()) {
            if (sweep_iters > 0) sweep.iterations = sweep_iters;
            if (sweep_workers > 0) sweep.workers = sweep_workers;
            if (!sweep_seeds.empty()) sweep.seeds = sweep_seeds;
            return cmd_sweep(sweep);
        }
        if (g->parsed()) return cmd_energy_report(energy);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
