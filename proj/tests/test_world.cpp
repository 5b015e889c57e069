// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "isacspike/array_geometry.hpp"
#include "isacspike/world.hpp"

using namespace isacspike;

TEST_CASE("evolve at broadside keeps the range and advances the angle") {
    VehicleState s{kPi / 2.0, 20.0, 12.0};
    Rng rng(1);
    const VehicleState next = evolve(s, 0.02, KinematicsNoise{}, rng);
    CHECK(next.d == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(next.theta == doctest::Approx(kPi / 2.0 + 12.0 * 0.02 / 20.0).epsilon(1e-9));
    CHECK(next.v == 12.0);
}

TEST_CASE("evolve matches the direct formula") {
    VehicleState s{1.0, 11.18, 12.0};
    Rng rng(2);
    const VehicleState next = evolve(s, 0.02, KinematicsNoise{}, rng);
    CHECK(next.theta ==
          doctest::Approx(1.0 + 12.0 * 0.02 * std::sin(1.0) / 11.18).epsilon(1e-12));
    CHECK(next.d == doctest::Approx(11.18 - 12.0 * 0.02 * std::cos(1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(evolve(VehicleState{1.0, -1.0, 5.0}, 0.02, KinematicsNoise{}, rng),
                    std::invalid_argument);
}

TEST_CASE("evolve range noise has the configured spread") {
    ScenarioConfig cfg;
    const KinematicsNoise noise = cfg.kinematics_noise();
    CHECK(noise.sigma_d == doctest::Approx(0.2));
    CHECK(noise.sigma_theta == doctest::Approx(0.02 * kPi / 180.0));
    Rng rng(99);
    VehicleState s{kPi / 2.0, 50.0, 12.0};  // broadside: deterministic part keeps d
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const VehicleState next = evolve(s, 0.02, noise, rng);
        const double w = next.d - 50.0;
        acc += w * w;
    }
    CHECK(std::sqrt(acc / draws) == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("init_episode geometry and velocity bounds") {
    ScenarioConfig cfg;
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<VehicleState> states = init_episode(cfg, rng);
        REQUIRE(states.size() == 3);
        CHECK(states[0].d == doctest::Approx(std::sqrt(125.0)).epsilon(1e-12));
        CHECK(states[0].d == doctest::Approx(11.1803).epsilon(1e-4));
        CHECK(std::cos(states[0].theta) == doctest::Approx(5.0 / std::sqrt(125.0)).epsilon(1e-12));
        CHECK(states[0].theta == doctest::Approx(1.1071).epsilon(1e-4));
        for (const auto& s : states) {
            CHECK(s.v >= 10.0);
            CHECK(s.v <= 14.0);
            CHECK(s.theta > 0.0);
            CHECK(s.theta < kPi);
        }
    }
}

TEST_CASE("decode_action zero input steers at the previous estimates with even powers") {
    ScenarioConfig cfg;
    const Vec prev = {1.1, 0.9, 0.7};
    BeamAction action;
    const BeamPlan plan = decode_action(Vec(6, 0.0), prev, cfg, &action);
    for (int k = 0; k < 3; ++k) {
        CHECK(action.steer_angles[k] == doctest::Approx(prev[k]));
        CHECK(plan.powers_w[k] == doctest::Approx(cfg.p_max_w() / 3.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(decode_action(Vec(5, 0.0), prev, cfg), std::invalid_argument);
}

TEST_CASE("decode_action softmax concentrates power under a dominant logit") {
    ScenarioConfig cfg;
    const Vec prev = {1.1, 0.9, 0.7};
    Vec raw(6, 0.0);
    raw[3] = 60.0;  // vehicle 0 power logit
    const BeamPlan plan = decode_action(raw, prev, cfg);
    CHECK(plan.powers_w[0] == doctest::Approx(cfg.p_max_w()).epsilon(1e-9));
    double total = 0.0;
    for (double p : plan.powers_w) {
        CHECK(p > 0.0);
        total += p;
    }
    CHECK(total == doctest::Approx(cfg.p_max_w()).epsilon(1e-12));
}

TEST_CASE("decode_action always satisfies the plan invariants") {
    ScenarioConfig cfg;
    Rng rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec raw(6);
        for (auto& x : raw) x = rng.normal(0.0, 3.0);
        Vec prev(3);
        for (auto& t : prev) t = rng.uniform(0.05, kPi - 0.05);
        const BeamPlan plan = decode_action(raw, prev, cfg);
        CHECK_NOTHROW(plan.validate(cfg.n_tx_antennas, cfg.p_max_w()));
        double total = 0.0;
        for (double p : plan.powers_w) total += p;
        CHECK(total <= cfg.p_max_w() + 1e-9);
    }
}

TEST_CASE("reward composes the module oracles for a single vehicle") {
    ScenarioConfig cfg;
    cfg.n_vehicles = 1;
    cfg.initial_x = {-5.0};
    cfg.initial_y = {10.0};
    const std::vector<VehicleState> states = {
        VehicleState{std::acos(5.0 / std::sqrt(125.0)), std::sqrt(125.0), 12.0}};
    BeamPlan plan;
    plan.beams.push_back(steering(states[0].theta, 32).elements);
    plan.powers_w.push_back(cfg.p_max_w());

    const RewardInfo info = reward(plan, states, cfg);
    CHECK(info.constraint_ok);
    // The factor-2 fairness form equals 2 for a single vehicle.
    CHECK(info.fairness == doctest::Approx(2.0));
    const LinkConstants link = cfg.link_constants();
    const double expected_rate =
        std::log2(1.0 + comm_sinr(0, plan, {states[0].theta}, {states[0].d}, link));
    CHECK(info.sum_rate == doctest::Approx(expected_rate).epsilon(1e-12));
    CHECK(info.reward == doctest::Approx(expected_rate * 2.0 - info.mean_crlb_theta -
                                         info.mean_crlb_d)
                             .epsilon(1e-12));
}

TEST_CASE("reward is exactly zero when a bound exceeds its threshold") {
    ScenarioConfig cfg;
    cfg.crlb_d_threshold = 0.0;  // unsatisfiable
    Rng rng(4);
    const std::vector<VehicleState> states = init_episode(cfg, rng);
    BeamPlan plan;
    for (const auto& s : states) plan.beams.push_back(steering(s.theta, 32).elements);
    plan.powers_w.assign(3, cfg.p_max_w() / 3.0);
    const RewardInfo info = reward(plan, states, cfg);
    CHECK(!info.constraint_ok);
    CHECK(info.reward == 0.0);
}

TEST_CASE("fairness is invariant under uniform rate scaling") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Vec rates(3);
        for (auto& r : rates) r = rng.uniform(0.1, 5.0);
        Vec scaled = rates;
        const double c = rng.uniform(0.5, 10.0);
        for (auto& r : scaled) r *= c;
        CHECK(jain_index(rates) == doctest::Approx(jain_index(scaled)).epsilon(1e-12));
    }
}

TEST_CASE("environment step contract") {
    ScenarioConfig cfg;
    IsacEnv env(cfg, 4242);
    Vec obs = env.reset();
    CHECK(obs.size() == 12);

    int steps = 0;
    bool done = false;
    while (!done) {
        const StepResult r = env.step(Vec(6, 0.0));
        CHECK(r.observation.size() == 12);
        CHECK(r.diag.rates.size() == 3);
        done = r.done;
        ++steps;
        REQUIRE(steps <= cfg.episode_steps);
    }
    CHECK(steps == cfg.episode_steps);
    CHECK_THROWS_AS(env.step(Vec(6, 0.0)), std::logic_error);
}

TEST_CASE("identical seeds and actions give identical trajectories") {
    ScenarioConfig cfg;
    Rng action_rng(31);
    std::vector<Vec> actions;
    for (int n = 0; n < cfg.episode_steps; ++n) {
        Vec a(6);
        for (auto& x : a) x = action_rng.normal(0.0, 0.5);
        actions.push_back(a);
    }

    auto run = [&](std::uint64_t seed) {
        IsacEnv env(cfg, seed);
        Vec first = env.reset();
        std::vector<double> stream(first.begin(), first.end());
        for (const auto& a : actions) {
            const StepResult r = env.step(a);
            stream.push_back(r.reward);
            stream.insert(stream.end(), r.observation.begin(), r.observation.end());
            if (r.done) break;
        }
        return stream;
    };

    const auto a = run(555);
    const auto b = run(555);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    const auto c = run(556);
    bool any_diff = false;
    for (std::size_t i = 0; i < std::min(a.size(), c.size()); ++i) any_diff |= a[i] != c[i];
    CHECK(any_diff);
}

TEST_CASE("noise-free kinematics pass through closest approach") {
    // Start far on the approach side; the range must shrink while cos(theta)
    // stays positive, bottom out near the lane offset, then grow again.
    VehicleState s{std::atan2(10.0, 25.0), std::sqrt(725.0), 12.0};
    Rng rng(6);
    const KinematicsNoise zero{};
    double min_d = s.d;
    bool decreasing_phase_ok = true;
    std::vector<double> ds;
    for (int n = 0; n < 300; ++n) {
        const VehicleState next = evolve(s, 0.02, zero, rng);
        if (std::cos(s.theta) > 0.05 && next.d >= s.d) decreasing_phase_ok = false;
        s = next;
        ds.push_back(s.d);
        min_d = std::min(min_d, s.d);
    }
    CHECK(decreasing_phase_ok);
    CHECK(min_d == doctest::Approx(10.0).epsilon(0.05));
    CHECK(ds.back() > min_d + 1.0);
    CHECK(std::cos(s.theta) < 0.0);
}

TEST_CASE("reward gains when sensing is lost via the cap") {
    // A plan whose beam misses vehicle 0 entirely trips the capped bound and
    // zeroes the reward through the indicator.
    ScenarioConfig cfg;
    Rng rng(8);
    const std::vector<VehicleState> states = init_episode(cfg, rng);
    BeamPlan plan;
    for (const auto& s : states) plan.beams.push_back(steering(s.theta, 32).elements);
    plan.powers_w.assign(3, cfg.p_max_w() / 3.0);
    // Replace beam 0 with a beam at the exact Dirichlet null of vehicle 0.
    const double c0 = std::cos(states[0].theta);
    plan.beams[0] = steering(std::acos(c0 - 2.0 / 32.0), 32).elements;
    const RewardInfo info = reward(plan, states, cfg);
    CHECK(info.mean_crlb_d >= kCrlbDistCap / 3.0 * 0.99);
    CHECK(!info.constraint_ok);
    CHECK(info.reward == 0.0);
}

TEST_CASE("environment frozen golden trajectory") {
    ScenarioConfig cfg;
    IsacEnv env(cfg, 20240807);
    const Vec obs = env.reset();
    CHECK(obs[0] == 0.35241638256869484);
    CHECK(obs[1] == 0.22359850069415296);
    CHECK(obs[4] == 0.1871670416225211);
    CHECK(obs[11] == 0.13763743381169632);
    StepResult r;
    for (int n = 0; n < 5; ++n) r = env.step(Vec(6, 0.0));
    CHECK(r.reward == 39.606544720130479);
    CHECK(r.observation[0] == 0.38280249576026443);
    CHECK(r.observation[3] == 0.27143016878425391);
}
