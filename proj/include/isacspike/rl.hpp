// SPDX-License-Identifier: Apache-2.0
//
// On-policy actor-critic trainer with a clipped ratio objective. Rollout
// collection and minibatch gradient accumulation run through OpenMP kernels
// with a serial reference path; both reduce in fixed order and produce
// bit-identical results.

#ifndef ISACSPIKE_RL_HPP_
#define ISACSPIKE_RL_HPP_

#include "isacspike/config.hpp"
#include "isacspike/energy.hpp"
#include "isacspike/env.hpp"
#include "isacspike/parallel.hpp"
#include "isacspike/snn.hpp"

namespace isacspike {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;

struct GaussianPolicy {
    Network net;  // outputs the action mean
    Vec log_std;  // state-independent, learned

    void clamp_log_std() {
        for (auto& x : log_std) x = clamp(x, kLogStdMin, kLogStdMax);
    }
};

struct ActorGradient {
    GradientSet net;
    Vec log_std;

    static ActorGradient zeros_like(const GaussianPolicy& p) {
        return {GradientSet::zeros_like(p.net), Vec(p.log_std.size(), 0.0)};
    }
    void accumulate(const ActorGradient& other, double scale = 1.0) {
        net.accumulate(other.net, scale);
        for (std::size_t i = 0; i < log_std.size(); ++i) log_std[i] += scale * other.log_std[i];
    }
};

// Diagonal Gaussian sampling and exact log density.
struct SampledAction {
    Vec action;
    double log_prob = 0.0;
};
SampledAction sample_action(const Vec& mean, const Vec& log_std, Rng& rng);
double gaussian_log_prob(const Vec& mean, const Vec& log_std, const Vec& action);

// Discounted suffix sums within each episode.
Vec returns_to_go(const Vec& rewards, const std::vector<std::size_t>& episode_starts,
                  double discount);

struct TrajectoryBatch {
    std::vector<Vec> observations;
    std::vector<Vec> actions;  // raw policy-space actions
    Vec log_probs;             // under the behavior policy
    Vec rewards;
    Vec returns;
    Vec values;
    Vec advantages;
    std::vector<std::size_t> episode_starts;

    std::size_t size() const { return observations.size(); }
};

// returns - values, then optionally normalized to zero mean / unit variance.
void compute_advantages(TrajectoryBatch& batch, bool normalize);

double critic_loss(const Vec& values, const Vec& returns);

// -- minibatch kernels ------------------------------------------------------

struct ActorMinibatchResult {
    ActorGradient grad;     // ascent-direction gradient of the mean clipped objective
    double objective = 0.0; // mean per-sample clipped objective
    std::uint64_t skipped = 0;  // non-finite ratios excluded
    EnergyLedger energy{EnergyContext::train};
};

ActorMinibatchResult actor_minibatch(const GaussianPolicy& policy, const TrajectoryBatch& batch,
                                     const std::vector<std::size_t>& idx, double clip_epsilon,
                                     ExecMode mode, int workers);

struct CriticMinibatchResult {
    GradientSet grad;   // descent-direction gradient of the mean squared error
    double loss = 0.0;  // mean squared error in return units
    EnergyLedger energy{EnergyContext::train};
};

CriticMinibatchResult critic_minibatch(const Network& critic, const TrajectoryBatch& batch,
                                       const std::vector<std::size_t>& idx, double value_scale,
                                       ExecMode mode, int workers);

// Critic values for every observation in the batch (value_scale applied).
void fill_values(const Network& critic, TrajectoryBatch& batch, double value_scale, ExecMode mode,
                 int workers);

// -- training ----------------------------------------------------------------

enum class AgentKind { spiking, dense };

struct IterationReport {
    std::uint64_t iteration = 0;
    double mean_reward = 0.0;
    double objective = 0.0;
    double critic_loss = 0.0;
    Vec firing_rates;  // per hidden layer, rollout mean; empty for dense
    double energy_train_j = 0.0;
    double wall_s = 0.0;
    double mean_sum_rate = 0.0;
    std::size_t transitions = 0;
    std::size_t episodes = 0;
    std::uint64_t skipped_samples = 0;
};

class Trainer {
  public:
    Trainer(const ScenarioConfig& cfg, AgentKind kind, std::uint64_t seed, int obs_dim = -1,
            int act_dim = -1);

    IterationReport run_iteration(const EnvFactory& factory);

    const ScenarioConfig& config() const { return cfg_; }
    AgentKind agent_kind() const { return kind_; }
    std::uint64_t iteration() const { return iteration_; }
    GaussianPolicy& actor() { return actor_; }
    const GaussianPolicy& actor() const { return actor_; }
    Network& critic() { return critic_; }
    const Network& critic() const { return critic_; }
    Optimizer& actor_optimizer() { return opt_actor_; }
    const Optimizer& actor_optimizer() const { return opt_actor_; }
    Optimizer& critic_optimizer() { return opt_critic_; }
    const Optimizer& critic_optimizer() const { return opt_critic_; }
    EnergyLedger& train_ledger() { return train_ledger_; }
    const EnergyLedger& train_ledger() const { return train_ledger_; }
    std::uint64_t master_seed() const { return master_seed_; }
    void set_iteration(std::uint64_t it) { iteration_ = it; }

  private:
    TrajectoryBatch collect_batch(const EnvFactory& factory, Vec& firing_rate_mean,
                                  double& mean_sum_rate, EnergyLedger& rollout_energy);

    ScenarioConfig cfg_;
    AgentKind kind_;
    std::uint64_t master_seed_;
    std::uint64_t iteration_ = 0;
    GaussianPolicy actor_;
    Network critic_;
    Optimizer opt_actor_;
    Optimizer opt_critic_;
    EnergyLedger train_ledger_{EnergyContext::train};
    ExecMode mode_ = ExecMode::serial;
};

// -- evaluation ----------------------------------------------------------------

enum class PolicyMode { mean, sampled, random };

struct EvalRow {
    int episode = 0;
    int step = 0;
    double reward = 0.0;
    double sum_rate = 0.0;
    Vec rates;
    Vec theta_err;
    Vec d_err;
    double mean_crlb_theta = 0.0;
    double mean_crlb_d = 0.0;
    double fairness = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    int episodes = 0;
    std::size_t total_steps = 0;
    double mean_reward = 0.0;
    double mean_sum_rate = 0.0;
    double rmse_theta = 0.0;
    double rmse_d = 0.0;
    double mean_crlb_theta = 0.0;
    double mean_crlb_d = 0.0;
    double mean_fairness = 0.0;
    double energy_per_step_j = 0.0;
    Vec mean_firing_rates;
};

// Deterministic (mean-action) rollout of a trained policy.
EvalReport evaluate(const GaussianPolicy& policy, const EnvFactory& factory, int episodes,
                    std::uint64_t seed, bool fairness_standard);

// Unit Gaussian actions each step; same report shape.
EvalReport baseline_random(const EnvFactory& factory, int episodes, std::uint64_t seed,
                           int action_dim, bool fairness_standard);

}  // namespace isacspike

#endif  // ISACSPIKE_RL_HPP_
