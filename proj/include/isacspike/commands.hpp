// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the CLI: training with checkpoint/resume,
// evaluation to CSV + JSON, the transmit-power sweep, and the energy report.

#ifndef ISACSPIKE_COMMANDS_HPP_
#define ISACSPIKE_COMMANDS_HPP_

#include <optional>
#include <string>

#include "isacspike/rl.hpp"

namespace isacspike {

struct TrainOptions {
    std::string config_path;  // empty -> defaults
    std::uint64_t seed = 1;
    std::string agent = "spiking";  // spiking | dense
    std::string out_dir = "out";
    std::optional<int> iterations;  // override config
    std::optional<int> workers;
    std::optional<double> p_max_dbm;
};

struct EvalOptions {
    std::string config_path;
    std::string checkpoint_path;  // required unless agent == random
    std::string agent = "spiking";  // informational; random selects the baseline
    std::uint64_t seed = 1;
    std::optional<int> episodes;
    std::string out_dir = "out";
};

struct SweepOptions {
    std::string config_path;
    std::vector<double> p_max_dbm_list;
    std::vector<std::uint64_t> seeds = {1};
    std::string agent = "spiking";
    std::string out_dir = "out";
    std::optional<int> iterations;  // override sweep_iterations
    std::optional<int> workers;
};

struct EnergyReportOptions {
    std::vector<std::string> metrics_paths;
    std::string out_path;  // empty -> stdout only
};

int cmd_train(const TrainOptions& opt);
int cmd_eval(const EvalOptions& opt);
int cmd_sweep(const SweepOptions& opt);
int cmd_energy_report(const EnergyReportOptions& opt);

// Shared helpers.
EnvFactory make_isac_factory(const ScenarioConfig& cfg);
AgentKind parse_agent_kind(const std::string& name);

struct SweepRow {
    double p_max_dbm = 0.0;
    double mean_sum_rate = 0.0;
    double rmse_theta = 0.0;
    double rmse_d = 0.0;
    double mean_crlb_theta = 0.0;
    double energy_ratio_dense_over_spiking = 0.0;
    double mean_reward = 0.0;
};

// One sweep cell: trains fresh agents per seed at the given budget and
// averages the evaluation metrics.
SweepRow run_sweep_point(const ScenarioConfig& base_cfg, double p_max_dbm,
                         const std::vector<std::uint64_t>& seeds, AgentKind kind, int iterations);

}  // namespace isacspike

#endif  // ISACSPIKE_COMMANDS_HPP_
