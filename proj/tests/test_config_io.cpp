// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "isacspike/checkpoint.hpp"
#include "isacspike/config.hpp"
#include "isacspike/metrics.hpp"

using namespace isacspike;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("isacspike_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

class CountingEnv final : public Environment {
  public:
    explicit CountingEnv(std::uint64_t seed) : rng_(seed) {}
    int observation_dim() const override { return 2; }
    int action_dim() const override { return 2; }
    Vec reset() override { return {rng_.uniform(), rng_.uniform()}; }
    StepResult step(const Vec& a) override {
        StepResult r;
        r.observation = {rng_.uniform(), rng_.uniform()};
        r.reward = -(a[0] * a[0] + a[1] * a[1]);
        r.done = ++n_ >= 5;
        return r;
    }

  private:
    Rng rng_;
    int n_ = 0;
};

}  // namespace

TEST_CASE("config defaults reproduce the reference scenario") {
    const ScenarioConfig cfg;
    CHECK(cfg.n_vehicles == 3);
    CHECK(cfg.n_tx_antennas == 32);
    CHECK(cfg.n_rx_antennas == 32);
    CHECK(cfg.carrier_hz == doctest::Approx(30e9));
    CHECK(cfg.slot_duration_s == doctest::Approx(0.02));
    CHECK(cfg.episode_steps == 100);
    CHECK(cfg.noise_sense_dbm == doctest::Approx(-80.0));
    CHECK(cfg.fading_re == doctest::Approx(10.0));
    CHECK(cfg.fading_im == doctest::Approx(10.0));
    CHECK(cfg.matched_gain == doctest::Approx(10.0));
    CHECK(cfg.alpha_tau == doctest::Approx(1e-9));
    CHECK(cfg.alpha_mu == doctest::Approx(2e3));
    CHECK(cfg.sigma_theta_deg == doctest::Approx(0.02));
    CHECK(cfg.sigma_d_m == doctest::Approx(0.2));
    CHECK(cfg.sigma_v_mps == doctest::Approx(0.5));
    CHECK(cfg.batch_size == 512);
    CHECK(cfg.discount == doctest::Approx(0.99));
    CHECK(cfg.clip_epsilon == doctest::Approx(0.2));
    CHECK(cfg.lr_actor == doctest::Approx(5e-5));
    CHECK(cfg.lr_critic == doctest::Approx(5e-4));
    CHECK(cfg.snn_steps == 6);
    CHECK(cfg.surrogate_eta == doctest::Approx(3.0));
    CHECK(cfg.lif_threshold == doctest::Approx(1.0));
    CHECK(cfg.lif_reset == doctest::Approx(0.0));
    CHECK(cfg.lif_leak == doctest::Approx(0.5));
    CHECK(cfg.hidden_neurons == 128);
    CHECK(cfg.p_max_dbm == doctest::Approx(40.0));
    CHECK(cfg.p_max_w() == doctest::Approx(10.0));
    CHECK(dbm_to_watts(-80.0) == doctest::Approx(1e-11));
    // An empty config file yields exactly the defaults.
    CHECK(parse_config("").hash() == cfg.hash());
}

TEST_CASE("config parsing: overrides, sections, comments, and errors") {
    const ScenarioConfig cfg = parse_config(
        "# comment\n"
        "[learning]\n"
        "batch_size = 64\n"
        "minibatch_size = 32\n"
        "lr_actor = 1e-3  # inline comment\n"
        "[scenario]\n"
        "p_max_dbm = 20\n"
        "initial_x = -1,-2,-3\n");
    CHECK(cfg.batch_size == 64);
    CHECK(cfg.lr_actor == doctest::Approx(1e-3));
    CHECK(cfg.p_max_dbm == doctest::Approx(20.0));
    CHECK(cfg.initial_x[2] == doctest::Approx(-3.0));

    CHECK_THROWS_WITH_AS(parse_config("no_such_field = 3\n"),
                         doctest::Contains("unknown field 'no_such_field'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("batch_size = banana\nminibatch_size = 1\n"),
                         doctest::Contains("malformed value"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("batch_size 64\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("batch_size = 64\nminibatch_size = 128\n"),
                    std::invalid_argument);  // minibatch exceeds batch
    CHECK_THROWS_AS(parse_config("discount = 1.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("checkpoint_every = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("workers = 0\n"), std::invalid_argument);
}

TEST_CASE("config hash is stable, sensitive to physics, blind to run control") {
    ScenarioConfig a;
    ScenarioConfig b;
    CHECK(a.hash() == b.hash());
    b.p_max_dbm = 30.0;
    CHECK(a.hash() != b.hash());
    ScenarioConfig c;
    c.iterations = 999;  // run-control field
    c.workers = 8;
    CHECK(a.hash() == c.hash());
}

TEST_CASE("checkpoint round trip preserves the trainer state") {
    TempDir tmp;
    ScenarioConfig cfg;
    cfg.batch_size = 40;
    cfg.minibatch_size = 20;
    cfg.hidden_neurons = 16;
    const auto factory = [](std::uint64_t s) { return std::make_unique<CountingEnv>(s); };

    Trainer trainer(cfg, AgentKind::spiking, 31, 2, 2);
    for (int i = 0; i < 3; ++i) trainer.run_iteration(factory);
    const std::string path = tmp.file("ckpt.bin");
    save_checkpoint(path, trainer);

    Trainer loaded = load_checkpoint(path, cfg, 2, 2);
    CHECK(loaded.iteration() == trainer.iteration());
    CHECK(loaded.agent_kind() == AgentKind::spiking);
    CHECK(loaded.actor().log_std == trainer.actor().log_std);
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(loaded.actor().net.weights[l].a == trainer.actor().net.weights[l].a);
        CHECK(loaded.critic().weights[l].a == trainer.critic().weights[l].a);
    }
    CHECK(loaded.actor_optimizer().step_count == trainer.actor_optimizer().step_count);
    CHECK(loaded.actor_optimizer().m == trainer.actor_optimizer().m);
    CHECK(loaded.train_ledger().ac_ops == trainer.train_ledger().ac_ops);

    // Continuing both trainers produces identical streams.
    const IterationReport r1 = trainer.run_iteration(factory);
    const IterationReport r2 = loaded.run_iteration(factory);
    CHECK(r1.mean_reward == r2.mean_reward);
    CHECK(r1.objective == r2.objective);
    CHECK(r1.critic_loss == r2.critic_loss);
    CHECK(r1.iteration == r2.iteration);

    // Config mismatch refuses to load.
    ScenarioConfig other = cfg;
    other.p_max_dbm = 17.0;
    CHECK_THROWS_WITH_AS(load_checkpoint(path, other, 2, 2), doctest::Contains("hash mismatch"),
                         std::runtime_error);
}

TEST_CASE("metrics JSONL round trip and CSV quoting") {
    TempDir tmp;
    const std::string path = tmp.file("metrics.jsonl");
    {
        MetricsWriter writer(path);
        writer.write_header(0xabcdULL, "spiking", 7);
        IterationReport rep;
        rep.iteration = 3;
        rep.mean_reward = 1.25;
        rep.objective = -0.5;
        rep.critic_loss = 2.0;
        rep.firing_rates = {0.25, 0.125};
        rep.energy_train_j = 1e-6;
        rep.wall_s = 0.5;
        rep.mean_sum_rate = 10.0;
        rep.transitions = 300;
        rep.episodes = 3;
        writer.write_iteration(rep, "spiking");
    }
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    Json header = Json::parse(line);
    CHECK(header["type"] == "run_header");
    CHECK(header["config_hash"] == 0xabcd);
    REQUIRE(std::getline(in, line));
    Json rec = Json::parse(line);
    CHECK(rec["type"] == "iteration");
    CHECK(rec["iteration"] == 3);
    CHECK(rec["mean_reward"] == doctest::Approx(1.25));
    CHECK(rec["firing_rates"].size() == 2);
    CHECK(rec["episodes"] == 3);

    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("with,comma") == "\"with,comma\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
