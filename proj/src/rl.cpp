// SPDX-License-Identifier: Apache-2.0

#include "isacspike/rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace isacspike {

SampledAction sample_action(const Vec& mean, const Vec& log_std, Rng& rng) {
    if (mean.size() != log_std.size())
        throw std::invalid_argument("sample_action: mean/log_std dimension mismatch");
    SampledAction out;
    out.action.resize(mean.size());
    for (std::size_t d = 0; d < mean.size(); ++d) {
        if (!std::isfinite(mean[d])) throw std::invalid_argument("sample_action: non-finite mean");
        out.action[d] = mean[d] + std::exp(log_std[d]) * rng.normal();
    }
    out.log_prob = gaussian_log_prob(mean, log_std, out.action);
    return out;
}

double gaussian_log_prob(const Vec& mean, const Vec& log_std, const Vec& action) {
    if (mean.size() != log_std.size() || mean.size() != action.size())
        throw std::invalid_argument("gaussian_log_prob: dimension mismatch");
    double lp = -0.5 * static_cast<double>(mean.size()) * std::log(2.0 * kPi);
    for (std::size_t d = 0; d < mean.size(); ++d) {
        const double sigma = std::exp(log_std[d]);
        const double z = (action[d] - mean[d]) / sigma;
        lp -= 0.5 * z * z + log_std[d];
    }
    return lp;
}

Vec returns_to_go(const Vec& rewards, const std::vector<std::size_t>& episode_starts,
                  double discount) {
    Vec out(rewards.size(), 0.0);
    for (std::size_t e = 0; e < episode_starts.size(); ++e) {
        const std::size_t begin = episode_starts[e];
        const std::size_t end =
            (e + 1 < episode_starts.size()) ? episode_starts[e + 1] : rewards.size();
        double acc = 0.0;
        for (std::size_t i = end; i-- > begin;) {
            acc = rewards[i] + discount * acc;
            out[i] = acc;
        }
    }
    return out;
}

void compute_advantages(TrajectoryBatch& batch, bool normalize) {
    if (batch.returns.size() != batch.values.size())
        throw std::invalid_argument("compute_advantages: returns/values mismatch");
    batch.advantages.resize(batch.returns.size());
    for (std::size_t i = 0; i < batch.returns.size(); ++i)
        batch.advantages[i] = batch.returns[i] - batch.values[i];
    if (!normalize || batch.advantages.empty()) return;
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(batch.advantages.size());
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(batch.advantages.size());
    const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
    for (double& a : batch.advantages) a = (a - mean) * inv_std;
}

double critic_loss(const Vec& values, const Vec& returns) {
    if (values.size() != returns.size())
        throw std::invalid_argument("critic_loss: dimension mismatch");
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double diff = values[i] - returns[i];
        acc += diff * diff;
    }
    return acc / static_cast<double>(values.size());
}

namespace {

constexpr std::size_t kChunkSamples = 16;  // fixed, so reductions are thread-count independent

std::size_t chunk_count(std::size_t n) { return (n + kChunkSamples - 1) / kChunkSamples; }

}  // namespace

ActorMinibatchResult actor_minibatch(const GaussianPolicy& policy, const TrajectoryBatch& batch,
                                     const std::vector<std::size_t>& idx, double clip_epsilon,
                                     ExecMode mode, int workers) {
    const std::size_t m = idx.size();
    const double inv_m = m ? 1.0 / static_cast<double>(m) : 0.0;
    const std::size_t chunks = chunk_count(m);

    struct ChunkAcc {
        ActorGradient grad;
        double objective = 0.0;
        std::uint64_t skipped = 0;
        EnergyLedger energy{EnergyContext::train};
    };
    std::vector<ChunkAcc> acc(chunks);
    for (auto& a : acc) a.grad = ActorGradient::zeros_like(policy);

    for_index(
        chunks,
        [&](std::size_t ci) {
            ChunkAcc& a = acc[ci];
            SpikeTrace strace;
            DenseTrace dtrace;
            const std::size_t begin = ci * kChunkSamples;
            const std::size_t end = std::min(m, begin + kChunkSamples);
            for (std::size_t s = begin; s < end; ++s) {
                const std::size_t i = idx[s];
                const Vec mean = net_forward(policy.net, batch.observations[i], strace, dtrace);
                if (policy.net.kind == NetKind::spiking)
                    a.energy.record_forward(policy.net, strace, /*training=*/true);
                else
                    a.energy.record_forward(policy.net, /*training=*/true);

                const double logp_new =
                    gaussian_log_prob(mean, policy.log_std, batch.actions[i]);
                const double ratio = std::exp(logp_new - batch.log_probs[i]);
                if (!std::isfinite(ratio)) {
                    ++a.skipped;
                    continue;
                }
                const double adv = batch.advantages[i];
                const double clip_branch =
                    (adv >= 0.0 ? 1.0 + clip_epsilon : 1.0 - clip_epsilon) * adv;
                const double unclipped = ratio * adv;
                a.objective += std::min(unclipped, clip_branch) * inv_m;
                if (unclipped > clip_branch) continue;  // clip branch active: zero gradient

                // d objective / d mean and d/d log_std through the ratio.
                Vec mean_grad(mean.size());
                const double scale = adv * ratio * inv_m;
                for (std::size_t d = 0; d < mean.size(); ++d) {
                    const double sigma = std::exp(policy.log_std[d]);
                    const double z = (batch.actions[i][d] - mean[d]) / sigma;
                    mean_grad[d] = scale * z / sigma;
                    a.grad.log_std[d] += scale * (z * z - 1.0);
                }
                a.grad.net.accumulate(
                    net_backward(policy.net, strace, dtrace, mean_grad));
            }
        },
        mode, workers);

    ActorMinibatchResult result;
    result.grad = ActorGradient::zeros_like(policy);
    for (const auto& a : acc) {
        result.grad.accumulate(a.grad);
        result.objective += a.objective;
        result.skipped += a.skipped;
        result.energy.merge(a.energy);
    }
    return result;
}

CriticMinibatchResult critic_minibatch(const Network& critic, const TrajectoryBatch& batch,
                                       const std::vector<std::size_t>& idx, double value_scale,
                                       ExecMode mode, int workers) {
    const std::size_t m = idx.size();
    const double inv_m = m ? 1.0 / static_cast<double>(m) : 0.0;
    const std::size_t chunks = chunk_count(m);

    struct ChunkAcc {
        GradientSet grad;
        double loss = 0.0;
        EnergyLedger energy{EnergyContext::train};
    };
    std::vector<ChunkAcc> acc(chunks);
    for (auto& a : acc) a.grad = GradientSet::zeros_like(critic);

    for_index(
        chunks,
        [&](std::size_t ci) {
            ChunkAcc& a = acc[ci];
            SpikeTrace strace;
            DenseTrace dtrace;
            const std::size_t begin = ci * kChunkSamples;
            const std::size_t end = std::min(m, begin + kChunkSamples);
            for (std::size_t s = begin; s < end; ++s) {
                const std::size_t i = idx[s];
                const Vec out = net_forward(critic, batch.observations[i], strace, dtrace);
                if (critic.kind == NetKind::spiking)
                    a.energy.record_forward(critic, strace, /*training=*/true);
                else
                    a.energy.record_forward(critic, /*training=*/true);
                const double value = out[0] * value_scale;
                const double diff = value - batch.returns[i];
                a.loss += diff * diff * inv_m;
                const Vec out_grad = {2.0 * diff * value_scale * inv_m};
                a.grad.accumulate(net_backward(critic, strace, dtrace, out_grad));
            }
        },
        mode, workers);

    CriticMinibatchResult result;
    result.grad = GradientSet::zeros_like(critic);
    for (const auto& a : acc) {
        result.grad.accumulate(a.grad);
        result.loss += a.loss;
        result.energy.merge(a.energy);
    }
    return result;
}

void fill_values(const Network& critic, TrajectoryBatch& batch, double value_scale, ExecMode mode,
                 int workers) {
    batch.values.assign(batch.size(), 0.0);
    const std::size_t chunks = chunk_count(batch.size());
    for_index(
        chunks,
        [&](std::size_t ci) {
            SpikeTrace strace;
            DenseTrace dtrace;
            const std::size_t begin = ci * kChunkSamples;
            const std::size_t end = std::min(batch.size(), begin + kChunkSamples);
            for (std::size_t i = begin; i < end; ++i) {
                const Vec out = net_forward(critic, batch.observations[i], strace, dtrace);
                batch.values[i] = out[0] * value_scale;
            }
        },
        mode, workers);
}

// -- trainer -------------------------------------------------------------------

Trainer::Trainer(const ScenarioConfig& cfg, AgentKind kind, std::uint64_t seed, int obs_dim,
                 int act_dim)
    : cfg_(cfg), kind_(kind), master_seed_(seed) {
    cfg_.validate();
    const int in_dim = obs_dim > 0 ? obs_dim : cfg_.observation_dim();
    const int out_dim = act_dim > 0 ? act_dim : cfg_.action_dim();
    const NetKind net_kind = (kind == AgentKind::spiking) ? NetKind::spiking : NetKind::dense;
    const double hidden_gain =
        (kind == AgentKind::spiking) ? cfg_.hidden_init_gain_snn : cfg_.hidden_init_gain_dense;

    Rng init_rng(derive_seed(seed, 0xA0C70AULL));
    const std::vector<int> actor_dims = {in_dim, cfg_.hidden_neurons, cfg_.hidden_neurons, out_dim};
    const std::vector<int> critic_dims = {in_dim, cfg_.hidden_neurons, cfg_.hidden_neurons, 1};
    actor_.net = make_network(net_kind, actor_dims, init_rng, hidden_gain, cfg_.policy_output_gain);
    critic_ = make_network(net_kind, critic_dims, init_rng, hidden_gain, cfg_.critic_output_gain);
    const LifParams lif{cfg_.lif_leak, cfg_.lif_threshold, cfg_.lif_reset, cfg_.snn_steps,
                        cfg_.surrogate_eta};
    actor_.net.lif = lif;
    critic_.lif = lif;
    actor_.log_std.assign(out_dim, cfg_.log_std_init);

    opt_actor_.rule = UpdateRule::adam;
    opt_actor_.lr = cfg_.lr_actor;
    opt_actor_.grad_clip = cfg_.grad_clip;
    opt_critic_.rule = UpdateRule::adam;
    opt_critic_.lr = cfg_.lr_critic;
    opt_critic_.grad_clip = cfg_.grad_clip;
    train_ledger_.train_cost_multiplier = cfg_.train_cost_multiplier;
    mode_ = cfg_.workers > 1 ? ExecMode::openmp : ExecMode::serial;
}

namespace {

struct EpisodeData {
    std::vector<Vec> observations;
    std::vector<Vec> actions;
    Vec log_probs;
    Vec rewards;
    double sum_rate_acc = 0.0;
    Vec firing_rate_acc;  // summed per hidden layer over steps
    std::size_t forwards = 0;
    EnergyLedger energy{EnergyContext::train};
};

EpisodeData run_training_episode(const GaussianPolicy& policy, Environment& env, Rng& sample_rng,
                                 double train_cost_multiplier) {
    EpisodeData ep;
    ep.energy.train_cost_multiplier = train_cost_multiplier;
    SpikeTrace strace;
    DenseTrace dtrace;
    Vec obs = env.reset();
    bool done = false;
    while (!done) {
        const Vec mean = net_forward(policy.net, obs, strace, dtrace);
        if (policy.net.kind == NetKind::spiking) {
            ep.energy.record_forward(policy.net, strace, /*training=*/false);
            const Vec rates = strace.firing_rates();
            if (ep.firing_rate_acc.empty()) ep.firing_rate_acc.assign(rates.size(), 0.0);
            for (std::size_t l = 0; l < rates.size(); ++l) ep.firing_rate_acc[l] += rates[l];
        } else {
            ep.energy.record_forward(policy.net, /*training=*/false);
        }
        ++ep.forwards;
        const SampledAction act = sample_action(mean, policy.log_std, sample_rng);
        const StepResult sr = env.step(act.action);
        ep.observations.push_back(std::move(obs));
        ep.actions.push_back(act.action);
        ep.log_probs.push_back(act.log_prob);
        ep.rewards.push_back(sr.reward);
        ep.sum_rate_acc += sr.diag.sum_rate;
        obs = sr.observation;
        done = sr.done;
    }
    return ep;
}

}  // namespace

TrajectoryBatch Trainer::collect_batch(const EnvFactory& factory, Vec& firing_rate_mean,
                                       double& mean_sum_rate, EnergyLedger& rollout_energy) {
    TrajectoryBatch batch;
    double sum_rate_acc = 0.0;
    Vec firing_acc;
    std::size_t forwards = 0;
    std::uint64_t episode_counter = 0;

    const int wave = std::max(1, cfg_.workers);
    while (batch.size() < static_cast<std::size_t>(cfg_.batch_size)) {
        std::vector<EpisodeData> slots(wave);
        for_index(
            static_cast<std::size_t>(wave),
            [&](std::size_t w) {
                const std::uint64_t ep_id = episode_counter + w;
                auto env = factory(derive_seed(master_seed_, iteration_ * 4 + 1, ep_id));
                Rng sample_rng(derive_seed(master_seed_, iteration_ * 4 + 2, ep_id));
                slots[w] = run_training_episode(actor_, *env, sample_rng,
                                                cfg_.train_cost_multiplier);
            },
            mode_, cfg_.workers);
        episode_counter += wave;
        for (auto& ep : slots) {
            // Excess wave episodes are dropped so the batch content is
            // independent of the worker count.
            if (batch.size() >= static_cast<std::size_t>(cfg_.batch_size)) break;
            batch.episode_starts.push_back(batch.size());
            for (std::size_t i = 0; i < ep.observations.size(); ++i) {
                batch.observations.push_back(std::move(ep.observations[i]));
                batch.actions.push_back(std::move(ep.actions[i]));
                batch.log_probs.push_back(ep.log_probs[i]);
                batch.rewards.push_back(ep.rewards[i]);
            }
            sum_rate_acc += ep.sum_rate_acc;
            if (!ep.firing_rate_acc.empty()) {
                if (firing_acc.empty()) firing_acc.assign(ep.firing_rate_acc.size(), 0.0);
                for (std::size_t l = 0; l < firing_acc.size(); ++l)
                    firing_acc[l] += ep.firing_rate_acc[l];
            }
            forwards += ep.forwards;
            rollout_energy.merge(ep.energy);
        }
    }

    mean_sum_rate = batch.size() ? sum_rate_acc / static_cast<double>(batch.size()) : 0.0;
    firing_rate_mean.clear();
    if (!firing_acc.empty() && forwards > 0) {
        firing_rate_mean.resize(firing_acc.size());
        for (std::size_t l = 0; l < firing_acc.size(); ++l)
            firing_rate_mean[l] = firing_acc[l] / static_cast<double>(forwards);
    }
    return batch;
}

IterationReport Trainer::run_iteration(const EnvFactory& factory) {
    const auto t0 = std::chrono::steady_clock::now();
    const double energy_before = train_ledger_.energy_joules();

    IterationReport report;
    report.iteration = iteration_;

    double mean_sum_rate = 0.0;
    TrajectoryBatch batch =
        collect_batch(factory, report.firing_rates, mean_sum_rate, train_ledger_);
    report.mean_sum_rate = mean_sum_rate;
    report.transitions = batch.size();
    report.episodes = batch.episode_starts.size();
    double reward_acc = 0.0;
    for (double r : batch.rewards) reward_acc += r;
    report.mean_reward = reward_acc / static_cast<double>(batch.size());

    batch.returns = returns_to_go(batch.rewards, batch.episode_starts, cfg_.discount);
    fill_values(critic_, batch, cfg_.value_scale, mode_, cfg_.workers);
    compute_advantages(batch, cfg_.normalize_advantages);

    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(master_seed_, iteration_ * 4 + 3, 0));

    double objective_acc = 0.0;
    double loss_acc = 0.0;
    std::size_t updates = 0;
    for (int epoch = 0; epoch < cfg_.update_epochs; ++epoch) {
        // Fisher-Yates with the dedicated stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle_rng.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start + cfg_.minibatch_size <= order.size();
             start += cfg_.minibatch_size) {
            const std::vector<std::size_t> idx(order.begin() + start,
                                               order.begin() + start + cfg_.minibatch_size);

            ActorMinibatchResult ar =
                actor_minibatch(actor_, batch, idx, cfg_.clip_epsilon, mode_, cfg_.workers);
            report.skipped_samples += ar.skipped;
            objective_acc += ar.objective;
            train_ledger_.merge(ar.energy);
            // Ascent on the clipped objective: descend along the negated gradient.
            ar.grad.net.scale(-1.0);
            for (auto& g : ar.grad.log_std) g = -g;
            opt_actor_.apply_update(ParamRefs::of(actor_.net, &actor_.log_std),
                                    GradRefs::of(ar.grad.net, &ar.grad.log_std));
            actor_.clamp_log_std();

            CriticMinibatchResult cr =
                critic_minibatch(critic_, batch, idx, cfg_.value_scale, mode_, cfg_.workers);
            loss_acc += cr.loss;
            train_ledger_.merge(cr.energy);
            opt_critic_.apply_update(ParamRefs::of(critic_), GradRefs::of(cr.grad));
            ++updates;
        }
    }
    if (updates) {
        report.objective = objective_acc / static_cast<double>(updates);
        report.critic_loss = loss_acc / static_cast<double>(updates);
    }
    report.energy_train_j = train_ledger_.energy_joules() - energy_before;
    report.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++iteration_;
    // On-policy: the batch dies here; nothing is carried to the next iteration.
    return report;
}

// -- evaluation ------------------------------------------------------------------

namespace {

EvalReport run_eval(const EnvFactory& factory, int episodes, std::uint64_t seed,
                    bool fairness_standard, const GaussianPolicy* policy, int action_dim) {
    if (episodes <= 0) throw std::invalid_argument("evaluate: episode count must be positive");
    EvalReport report;
    report.episodes = episodes;
    EnergyLedger ledger{EnergyContext::inference};
    Vec firing_acc;
    std::size_t forwards = 0;
    double reward_acc = 0.0, rate_acc = 0.0, fair_acc = 0.0;
    double th_sq = 0.0, d_sq = 0.0, crlb_th_acc = 0.0, crlb_d_acc = 0.0;
    std::size_t err_count = 0;

    SpikeTrace strace;
    DenseTrace dtrace;
    for (int e = 0; e < episodes; ++e) {
        auto env = factory(derive_seed(seed, 0xEBA1ULL, static_cast<std::uint64_t>(e)));
        Rng action_rng(derive_seed(seed, 0xAC7ULL, static_cast<std::uint64_t>(e)));
        Vec obs = env->reset();
        bool done = false;
        int step = 0;
        while (!done) {
            Vec action;
            if (policy) {
                action = net_forward(policy->net, obs, strace, dtrace);
                if (policy->net.kind == NetKind::spiking) {
                    ledger.record_forward(policy->net, strace);
                    const Vec rates = strace.firing_rates();
                    if (firing_acc.empty()) firing_acc.assign(rates.size(), 0.0);
                    for (std::size_t l = 0; l < rates.size(); ++l) firing_acc[l] += rates[l];
                } else {
                    ledger.record_forward(policy->net);
                }
                ++forwards;
            } else {
                action.resize(action_dim);
                for (auto& a : action) a = action_rng.normal();
            }
            const StepResult sr = env->step(action);
            EvalRow row;
            row.episode = e;
            row.step = step;
            row.reward = sr.reward;
            row.sum_rate = sr.diag.sum_rate;
            row.rates = sr.diag.rates;
            row.theta_err = sr.diag.theta_err;
            row.d_err = sr.diag.d_err;
            row.mean_crlb_theta = sr.diag.mean_crlb_theta;
            row.mean_crlb_d = sr.diag.mean_crlb_d;
            if (!sr.diag.rates.empty()) row.fairness = jain_index(sr.diag.rates, fairness_standard);
            reward_acc += row.reward;
            rate_acc += row.sum_rate;
            fair_acc += row.fairness;
            crlb_th_acc += row.mean_crlb_theta;
            crlb_d_acc += row.mean_crlb_d;
            for (double err : row.theta_err) th_sq += err * err;
            for (double err : row.d_err) d_sq += err * err;
            err_count += row.theta_err.size();
            report.rows.push_back(std::move(row));
            obs = sr.observation;
            done = sr.done;
            ++step;
        }
    }
    report.total_steps = report.rows.size();
    const double n = static_cast<double>(report.total_steps);
    report.mean_reward = reward_acc / n;
    report.mean_sum_rate = rate_acc / n;
    report.mean_fairness = fair_acc / n;
    report.mean_crlb_theta = crlb_th_acc / n;
    report.mean_crlb_d = crlb_d_acc / n;
    if (err_count) {
        report.rmse_theta = std::sqrt(th_sq / static_cast<double>(err_count));
        report.rmse_d = std::sqrt(d_sq / static_cast<double>(err_count));
    }
    if (forwards) {
        report.energy_per_step_j = ledger.energy_joules() / static_cast<double>(forwards);
        if (!firing_acc.empty()) {
            report.mean_firing_rates.resize(firing_acc.size());
            for (std::size_t l = 0; l < firing_acc.size(); ++l)
                report.mean_firing_rates[l] = firing_acc[l] / static_cast<double>(forwards);
        }
    }
    return report;
}

}  // namespace

EvalReport evaluate(const GaussianPolicy& policy, const EnvFactory& factory, int episodes,
                    std::uint64_t seed, bool fairness_standard) {
    return run_eval(factory, episodes, seed, fairness_standard, &policy, 0);
}

EvalReport baseline_random(const EnvFactory& factory, int episodes, std::uint64_t seed,
                           int action_dim, bool fairness_standard) {
    return run_eval(factory, episodes, seed, fairness_standard, nullptr, action_dim);
}

}  // namespace isacspike
