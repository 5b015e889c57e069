// SPDX-License-Identifier: Apache-2.0
//
// Timing comparison of the serial reference kernels against the OpenMP
// paths: minibatch gradient accumulation, batch value fill, and rollout
// collection. Outputs one row per kernel and thread count.

#include <chrono>
#include <cstdio>

#include "isacspike/parallel.hpp"
#include "isacspike/rl.hpp"
#include "isacspike/world.hpp"

using namespace isacspike;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fixture {
    ScenarioConfig cfg;
    GaussianPolicy policy;
    Network critic;
    TrajectoryBatch batch;
    std::vector<std::size_t> idx;

    Fixture() {
        cfg.batch_size = 512;
        Rng rng(17);
        policy.net = make_network(NetKind::spiking, {12, 128, 128, 6}, rng, 4.0, 0.01);
        policy.net.lif = LifParams{0.5, 1.0, 0.0, 6, 3.0};
        policy.log_std.assign(6, -1.2);
        critic = make_network(NetKind::spiking, {12, 128, 128, 1}, rng, 4.0, 1.0);
        critic.lif = policy.net.lif;

        SpikeTrace st;
        DenseTrace dt;
        for (int e = 0; e < 6; ++e) {
            IsacEnv env(cfg, 100 + e);
            Rng sampler(200 + e);
            Vec obs = env.reset();
            batch.episode_starts.push_back(batch.size());
            bool done = false;
            while (!done) {
                const Vec mean = net_forward(policy.net, obs, st, dt);
                const SampledAction a = sample_action(mean, policy.log_std, sampler);
                const StepResult r = env.step(a.action);
                batch.observations.push_back(obs);
                batch.actions.push_back(a.action);
                batch.log_probs.push_back(a.log_prob);
                batch.rewards.push_back(r.reward);
                obs = r.observation;
                done = r.done;
            }
        }
        batch.returns = returns_to_go(batch.rewards, batch.episode_starts, cfg.discount);
        fill_values(critic, batch, cfg.value_scale, ExecMode::serial, 1);
        compute_advantages(batch, true);
        for (std::size_t i = 0; i < batch.size(); ++i) idx.push_back(i);
    }
};

}  // namespace

int main() {
    Fixture fx;
    const int reps = 5;
    std::printf("%-28s %-8s %10s %10s\n", "kernel", "mode", "time_s", "speedup");

    auto time_actor = [&](ExecMode mode, int workers) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r)
            actor_minibatch(fx.policy, fx.batch, fx.idx, 0.2, mode, workers);
        return seconds_since(t0) / reps;
    };
    auto time_critic = [&](ExecMode mode, int workers) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r)
            critic_minibatch(fx.critic, fx.batch, fx.idx, fx.cfg.value_scale, mode, workers);
        return seconds_since(t0) / reps;
    };
    auto time_values = [&](ExecMode mode, int workers) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r)
            fill_values(fx.critic, fx.batch, fx.cfg.value_scale, mode, workers);
        return seconds_since(t0) / reps;
    };

    const int threads = hardware_threads();
    const double actor_serial = time_actor(ExecMode::serial, 1);
    std::printf("%-28s %-8s %10.4f %10s\n", "actor_minibatch(512)", "serial", actor_serial, "1.00x");
    const double actor_par = time_actor(ExecMode::openmp, threads);
    std::printf("%-28s %-8s %10.4f %9.2fx\n", "actor_minibatch(512)", "openmp", actor_par,
                actor_serial / actor_par);

    const double critic_serial = time_critic(ExecMode::serial, 1);
    std::printf("%-28s %-8s %10.4f %10s\n", "critic_minibatch(512)", "serial", critic_serial,
                "1.00x");
    const double critic_par = time_critic(ExecMode::openmp, threads);
    std::printf("%-28s %-8s %10.4f %9.2fx\n", "critic_minibatch(512)", "openmp", critic_par,
                critic_serial / critic_par);

    const double values_serial = time_values(ExecMode::serial, 1);
    std::printf("%-28s %-8s %10.4f %10s\n", "fill_values(600)", "serial", values_serial, "1.00x");
    const double values_par = time_values(ExecMode::openmp, threads);
    std::printf("%-28s %-8s %10.4f %9.2fx\n", "fill_values(600)", "openmp", values_par,
                values_serial / values_par);

    std::printf("threads available: %d\n", threads);
    return 0;
}
