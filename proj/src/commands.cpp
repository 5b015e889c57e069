// SPDX-License-Identifier: Apache-2.0

#include "isacspike/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "isacspike/checkpoint.hpp"
#include "isacspike/metrics.hpp"
#include "isacspike/world.hpp"

namespace isacspike {

namespace fs = std::filesystem;

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("ISACSPIKE_LOG");
        if (!env) return 1;
        const std::string v = env;
        if (v == "silent" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[isacspike] " << msg << "\n";
}

ScenarioConfig load_or_fail(const std::string& path) {
    ScenarioConfig cfg = load_config(path);
    cfg.validate();
    return cfg;
}

// Windowed-mean plateau detector over the reward history.
class PlateauDetector {
  public:
    PlateauDetector(int window, double min_gain) : window_(window), min_gain_(min_gain) {}

    // Returns true when training has stalled.
    bool update(double reward) {
        history_.push_back(reward);
        if (static_cast<int>(history_.size()) < 2 * window_) return false;
        const double now = window_mean(history_.size() - window_);
        const double before = window_mean(history_.size() - 2 * window_);
        const double threshold = min_gain_ * std::max(std::abs(before), 1e-9);
        return now - before < threshold;
    }

  private:
    double window_mean(std::size_t start) const {
        double acc = 0.0;
        for (int i = 0; i < window_; ++i) acc += history_[start + i];
        return acc / window_;
    }
    int window_;
    double min_gain_;
    std::vector<double> history_;
};

std::string agent_name(AgentKind kind) {
    return kind == AgentKind::spiking ? "spiking" : "dense";
}

void write_summary(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

AgentKind parse_agent_kind(const std::string& name) {
    if (name == "spiking") return AgentKind::spiking;
    if (name == "dense") return AgentKind::dense;
    throw std::invalid_argument("unknown agent kind: " + name + " (expected spiking or dense)");
}

EnvFactory make_isac_factory(const ScenarioConfig& cfg) {
    return [cfg](std::uint64_t seed) { return std::make_unique<IsacEnv>(cfg, seed); };
}

int cmd_train(const TrainOptions& opt) {
    ScenarioConfig cfg = load_or_fail(opt.config_path);
    if (opt.workers) cfg.workers = *opt.workers;
    if (opt.iterations) cfg.iterations = *opt.iterations;
    if (opt.p_max_dbm) cfg.p_max_dbm = *opt.p_max_dbm;
    cfg.validate();
    const AgentKind kind = parse_agent_kind(opt.agent);

    fs::create_directories(opt.out_dir);
    const std::string checkpoint_latest = opt.out_dir + "/checkpoint_latest.bin";
    const std::string metrics_path = opt.out_dir + "/metrics.jsonl";

    std::optional<Trainer> trainer;
    if (fs::exists(checkpoint_latest)) {
        trainer.emplace(load_checkpoint(checkpoint_latest, cfg));
        if (trainer->agent_kind() != kind)
            throw std::runtime_error("checkpoint agent kind differs from --agent");
        log_info("resuming from iteration " + std::to_string(trainer->iteration()));
    } else {
        trainer.emplace(cfg, kind, opt.seed);
    }

    MetricsWriter metrics(metrics_path);
    if (trainer->iteration() == 0)
        metrics.write_header(cfg.hash(), agent_name(kind), opt.seed);

    const EnvFactory factory = make_isac_factory(cfg);
    PlateauDetector plateau(cfg.plateau_window, cfg.plateau_min_gain);
    IterationReport last;
    while (trainer->iteration() < static_cast<std::uint64_t>(cfg.iterations)) {
        last = trainer->run_iteration(factory);
        metrics.write_iteration(last, agent_name(kind));
        if (log_level() >= 2)
            log_info("iter " + std::to_string(last.iteration) +
                     " reward " + std::to_string(last.mean_reward));
        if ((last.iteration + 1) % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0) {
            save_checkpoint(checkpoint_latest, *trainer);
            char name[64];
            std::snprintf(name, sizeof(name), "/checkpoint_%06llu.bin",
                          static_cast<unsigned long long>(last.iteration + 1));
            save_checkpoint(opt.out_dir + name, *trainer);
        }
        if (plateau.update(last.mean_reward)) {
            log_info("reward plateau reached at iteration " + std::to_string(last.iteration));
            break;
        }
    }
    save_checkpoint(checkpoint_latest, *trainer);

    write_summary(opt.out_dir + "/summary.json",
                  Json{{"type", "train_summary"},
                       {"agent", agent_name(kind)},
                       {"config_hash", cfg.hash()},
                       {"seed", opt.seed},
                       {"iterations_completed", trainer->iteration()},
                       {"final_mean_reward", last.mean_reward},
                       {"final_mean_sum_rate", last.mean_sum_rate},
                       {"energy_train_total_j", trainer->train_ledger().energy_joules()},
                       {"skipped_updates",
                        trainer->actor_optimizer().skipped + trainer->critic_optimizer().skipped}});
    log_info("training finished at iteration " + std::to_string(trainer->iteration()));
    return 0;
}

int cmd_eval(const EvalOptions& opt) {
    ScenarioConfig cfg = load_or_fail(opt.config_path);
    const int episodes = opt.episodes.value_or(cfg.eval_episodes);
    fs::create_directories(opt.out_dir);
    const EnvFactory factory = make_isac_factory(cfg);

    EvalReport report;
    std::string agent = opt.agent;
    if (opt.agent == "random") {
        report = baseline_random(factory, episodes, opt.seed, cfg.action_dim(),
                                 cfg.fairness_standard);
    } else {
        if (opt.checkpoint_path.empty() || !fs::exists(opt.checkpoint_path)) {
            std::cerr << "eval: checkpoint not found: " << opt.checkpoint_path << "\n";
            return 2;
        }
        Trainer trainer = load_checkpoint(opt.checkpoint_path, cfg);
        agent = agent_name(trainer.agent_kind());
        report = evaluate(trainer.actor(), factory, episodes, opt.seed, cfg.fairness_standard);
    }

    write_eval_csv(opt.out_dir + "/eval.csv", report);
    Json summary = eval_summary_to_json(report, agent);
    summary["config_hash"] = cfg.hash();
    summary["seed"] = opt.seed;
    write_summary(opt.out_dir + "/eval_summary.json", summary);

    MetricsWriter metrics(opt.out_dir + "/metrics.jsonl");
    metrics.write_json(summary);
    log_info("eval: mean sum-rate " + std::to_string(report.mean_sum_rate) + " over " +
             std::to_string(report.total_steps) + " steps");
    return 0;
}

SweepRow run_sweep_point(const ScenarioConfig& base_cfg, double p_max_dbm,
                         const std::vector<std::uint64_t>& seeds, AgentKind kind,
                         int iterations) {
    ScenarioConfig cfg = base_cfg;
    cfg.p_max_dbm = p_max_dbm;
    cfg.validate();
    const EnvFactory factory = make_isac_factory(cfg);

    SweepRow row;
    row.p_max_dbm = p_max_dbm;
    for (const std::uint64_t seed : seeds) {
        Trainer trainer(cfg, kind, seed);
        for (int i = 0; i < iterations; ++i) trainer.run_iteration(factory);
        const EvalReport rep = evaluate(trainer.actor(), factory, cfg.sweep_eval_episodes,
                                        derive_seed(seed, 0xE7a1), cfg.fairness_standard);
        row.mean_sum_rate += rep.mean_sum_rate;
        row.rmse_theta += rep.rmse_theta;
        row.rmse_d += rep.rmse_d;
        row.mean_crlb_theta += rep.mean_crlb_theta;
        row.mean_reward += rep.mean_reward;
        if (kind == AgentKind::spiking && !rep.mean_firing_rates.empty()) {
            const auto dims = trainer.actor().net.layer_dims();
            const double e_spk = energy_spiking(flops_spiking(dims, rep.mean_firing_rates),
                                                cfg.snn_steps, dims.back());
            row.energy_ratio_dense_over_spiking += energy_dense(dims) / e_spk;
        }
    }
    const double n = static_cast<double>(seeds.size());
    row.mean_sum_rate /= n;
    row.rmse_theta /= n;
    row.rmse_d /= n;
    row.mean_crlb_theta /= n;
    row.mean_reward /= n;
    row.energy_ratio_dense_over_spiking /= n;
    return row;
}

int cmd_sweep(const SweepOptions& opt) {
    if (opt.p_max_dbm_list.empty()) {
        log_info("sweep: empty power list, nothing to do");
        return 0;
    }
    ScenarioConfig cfg = load_or_fail(opt.config_path);
    if (opt.workers) cfg.workers = *opt.workers;
    const int iterations = opt.iterations.value_or(cfg.sweep_iterations);
    const AgentKind kind = parse_agent_kind(opt.agent);
    fs::create_directories(opt.out_dir);

    std::ofstream csv(opt.out_dir + "/sweep.csv");
    if (!csv) throw std::runtime_error("cannot open sweep.csv");
    csv << "p_max_dbm,mean_sum_rate,rmse_theta,rmse_d,mean_crlb_theta,"
           "energy_ratio_dense_over_spiking,mean_reward\r\n";
    csv.precision(17);
    for (const double p : opt.p_max_dbm_list) {
        log_info("sweep point " + std::to_string(p) + " dBm");
        const SweepRow row = run_sweep_point(cfg, p, opt.seeds, kind, iterations);
        csv << row.p_max_dbm << ',' << row.mean_sum_rate << ',' << row.rmse_theta << ','
            << row.rmse_d << ',' << row.mean_crlb_theta << ','
            << row.energy_ratio_dense_over_spiking << ',' << row.mean_reward << "\r\n";
        csv.flush();
    }
    return 0;
}

int cmd_energy_report(const EnergyReportOptions& opt) {
    struct Tally {
        double train_j = 0.0;
        double train_episodes = 0.0;
        double infer_j = 0.0;
        double infer_episodes = 0.0;
    };
    std::map<std::string, Tally> by_agent;
    std::size_t malformed = 0;

    for (const std::string& path : opt.metrics_paths) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << "energy-report: cannot open " << path << "\n";
            return 2;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Json j = Json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("type")) {
                ++malformed;
                continue;
            }
            try {
                const std::string type = j["type"];
                if (type == "iteration") {
                    Tally& t = by_agent[j["agent"]];
                    t.train_j += j["energy_train_j"].get<double>();
                    t.train_episodes += j["episodes"].get<double>();
                } else if (type == "eval") {
                    Tally& t = by_agent[j["agent"]];
                    const double steps = j["total_steps"].get<double>();
                    t.infer_j += j["energy_per_step_j"].get<double>() * steps;
                    t.infer_episodes += j["episodes"].get<double>();
                }
            } catch (const Json::exception&) {
                ++malformed;
            }
        }
    }

    Json report;
    report["type"] = "energy_report";
    report["malformed_lines"] = malformed;
    for (const auto& [agent, tally] : by_agent) {
        report["agents"][agent] = {
            {"train_energy_per_episode_j",
             tally.train_episodes > 0 ? tally.train_j / tally.train_episodes : 0.0},
            {"inference_energy_per_episode_j",
             tally.infer_episodes > 0 ? tally.infer_j / tally.infer_episodes : 0.0}};
    }
    if (by_agent.count("spiking") && by_agent.count("dense")) {
        const Tally& s = by_agent["spiking"];
        const Tally& d = by_agent["dense"];
        if (s.train_j > 0.0 && s.train_episodes > 0 && d.train_episodes > 0)
            report["dense_over_spiking_train"] =
                (d.train_j / d.train_episodes) / (s.train_j / s.train_episodes);
        if (s.infer_j > 0.0 && s.infer_episodes > 0 && d.infer_episodes > 0)
            report["dense_over_spiking_inference"] =
                (d.infer_j / d.infer_episodes) / (s.infer_j / s.infer_episodes);
    }

    std::cout << report.dump(2) << "\n";
    if (!opt.out_path.empty()) write_summary(opt.out_path, report);
    return 0;
}

}  // namespace isacspike
