// SPDX-License-Identifier: Apache-2.0

#include "isacspike/world.hpp"

#include <cmath>

#include "isacspike/array_geometry.hpp"

namespace isacspike {

namespace {

constexpr double kMinDistance = 0.5;
constexpr double kThetaMargin = 1e-3;
constexpr double kMinVelocity = 0.01;

}  // namespace

VehicleState evolve(const VehicleState& s, double dt, const KinematicsNoise& noise, Rng& rng) {
    if (!(s.d > 0.0) || !(s.theta > 0.0 && s.theta < kPi))
        throw std::invalid_argument("evolve: invalid vehicle state");
    VehicleState next;
    next.theta = s.theta + s.v * dt * std::sin(s.theta) / s.d;
    next.d = s.d - s.v * dt * std::cos(s.theta);
    next.v = s.v;
    if (noise.sigma_theta > 0.0) next.theta += rng.normal(0.0, noise.sigma_theta);
    if (noise.sigma_d > 0.0) next.d += rng.normal(0.0, noise.sigma_d);
    if (noise.sigma_v > 0.0) next.v += rng.normal(0.0, noise.sigma_v);
    next.theta = clamp(next.theta, kThetaMargin, kPi - kThetaMargin);
    next.d = std::max(next.d, kMinDistance);
    next.v = std::max(next.v, kMinVelocity);
    return next;
}

std::vector<VehicleState> init_episode(const ScenarioConfig& cfg, Rng& rng) {
    std::vector<VehicleState> states(cfg.n_vehicles);
    for (int k = 0; k < cfg.n_vehicles; ++k) {
        const double x = cfg.initial_x[k];
        const double y = cfg.initial_y[k];
        VehicleState s;
        s.d = std::sqrt(x * x + y * y);
        // cos(theta) = -x/d, sin(theta) = y/d > 0 keeps theta in (0, pi).
        s.theta = std::atan2(y, -x);
        s.v = rng.uniform(cfg.velocity_min_mps, cfg.velocity_max_mps);
        states[k] = s;
    }
    return states;
}

BeamPlan decode_action(const Vec& raw, const Vec& prev_theta_hat, const ScenarioConfig& cfg,
                       BeamAction* decoded) {
    const int k = cfg.n_vehicles;
    if (raw.size() != static_cast<std::size_t>(2 * k))
        throw std::invalid_argument("decode_action: raw action must have 2K entries");
    if (prev_theta_hat.size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("decode_action: need one previous angle per vehicle");

    BeamPlan plan;
    plan.beams.reserve(k);
    plan.powers_w.resize(k);
    BeamAction action;
    action.steer_angles.resize(k);
    action.power_logits.assign(raw.begin() + k, raw.end());

    for (int i = 0; i < k; ++i) {
        const double angle = clamp(prev_theta_hat[i] + cfg.steer_span_rad * std::tanh(raw[i]), 0.01,
                                   kPi - 0.01);
        action.steer_angles[i] = angle;
        plan.beams.push_back(steering(angle, cfg.n_tx_antennas).elements);
    }

    // Stable softmax; the shares sum to one exactly after renormalization, so
    // the power budget holds by construction.
    double max_logit = action.power_logits[0];
    for (double l : action.power_logits) max_logit = std::max(max_logit, l);
    double z = 0.0;
    Vec shares(k);
    for (int i = 0; i < k; ++i) {
        shares[i] = std::exp(action.power_logits[i] - max_logit);
        z += shares[i];
    }
    const double p_max = cfg.p_max_w();
    for (int i = 0; i < k; ++i) plan.powers_w[i] = p_max * shares[i] / z;

    if (decoded) *decoded = action;
    return plan;
}

RewardInfo reward(const BeamPlan& plan, const std::vector<VehicleState>& true_states,
                  const ScenarioConfig& cfg) {
    const LinkConstants link = cfg.link_constants();
    const MeasurementNoiseParams noise_params = cfg.noise_params();
    const std::size_t k_count = true_states.size();
    Vec thetas(k_count), dists(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        thetas[k] = true_states[k].theta;
        dists[k] = true_states[k].d;
    }

    RewardInfo info;
    const RateReport rates = sum_rate(plan, thetas, dists, link);
    info.sum_rate = rates.total;
    info.rates = rates.per_vehicle;
    info.fairness = jain_index(rates.per_vehicle, cfg.fairness_standard);

    double crlb_theta_acc = 0.0;
    double crlb_d_acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        const MeasurementNoise noise = noise_variances(k, plan, thetas, dists, link, noise_params);
        crlb_theta_acc +=
            crlb_theta(thetas[k], dists[k], plan.beams[k], plan.powers_w[k], link, noise).value;
        crlb_d_acc += crlb_d(noise);
    }
    info.mean_crlb_theta = crlb_theta_acc / static_cast<double>(k_count);
    info.mean_crlb_d = crlb_d_acc / static_cast<double>(k_count);
    info.constraint_ok = info.mean_crlb_theta <= cfg.crlb_theta_threshold &&
                         info.mean_crlb_d <= cfg.crlb_d_threshold;
    info.reward = info.constraint_ok
                      ? info.sum_rate * info.fairness - info.mean_crlb_theta - info.mean_crlb_d
                      : 0.0;
    return info;
}

IsacEnv::IsacEnv(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), link_(cfg.link_constants()), rng_(seed) {
    cfg_.validate();
}

Vec IsacEnv::observation() const {
    Vec obs;
    obs.reserve(cfg_.observation_dim());
    for (const auto& est : estimates_) {
        obs.push_back(est.theta_hat * cfg_.obs_theta_scale);
        obs.push_back(est.d_hat * cfg_.obs_dist_scale);
        obs.push_back(est.v_hat * cfg_.obs_vel_scale);
        obs.push_back(std::log10(1.0 + est.prev_comm_sinr) * cfg_.obs_sinr_scale);
    }
    return obs;
}

void IsacEnv::measure_all(const BeamPlan& plan, StepDiag* diag) {
    const MeasurementNoiseParams noise_params = cfg_.noise_params();
    Vec thetas(true_states_.size()), dists(true_states_.size());
    for (std::size_t k = 0; k < true_states_.size(); ++k) {
        thetas[k] = true_states_[k].theta;
        dists[k] = true_states_[k].d;
    }
    for (std::size_t k = 0; k < true_states_.size(); ++k) {
        const MeasurementNoise noise =
            noise_variances(k, plan, thetas, dists, link_, noise_params);
        const Measurement m = simulate_measurement(true_states_[k], plan, k, link_, noise, rng_);
        EstimatedVehicleState est =
            estimate_state(m, plan, k, true_states_[k], estimates_[k], link_, noise, rng_);
        est.prev_comm_sinr = comm_sinr(k, plan, thetas, dists, link_);
        if (diag) {
            diag->theta_err.push_back(est.theta_hat - true_states_[k].theta);
            diag->d_err.push_back(est.d_hat - true_states_[k].d);
        }
        estimates_[k] = est;
    }
}

Vec IsacEnv::reset() {
    true_states_ = init_episode(cfg_, rng_);
    estimates_.assign(true_states_.size(), EstimatedVehicleState{});
    for (std::size_t k = 0; k < estimates_.size(); ++k)
        estimates_[k].v_hat = 0.5 * (cfg_.velocity_min_mps + cfg_.velocity_max_mps);

    // Acquisition pass: before the first decision the unit sweeps matched
    // beams with an even power split to obtain the initial estimates.
    BeamPlan plan;
    plan.powers_w.assign(true_states_.size(), cfg_.p_max_w() / true_states_.size());
    for (const auto& s : true_states_)
        plan.beams.push_back(steering(s.theta, cfg_.n_tx_antennas).elements);
    measure_all(plan, nullptr);

    n_ = 0;
    active_ = true;
    return observation();
}

StepResult IsacEnv::step(const Vec& raw_action) {
    if (!active_) throw std::logic_error("IsacEnv::step called on a finished episode");

    Vec prev_theta_hat(estimates_.size());
    for (std::size_t k = 0; k < estimates_.size(); ++k) prev_theta_hat[k] = estimates_[k].theta_hat;
    const BeamPlan plan = decode_action(raw_action, prev_theta_hat, cfg_);

    StepResult result;
    const RewardInfo r = reward(plan, true_states_, cfg_);
    result.reward = r.reward;
    result.diag.sum_rate = r.sum_rate;
    result.diag.rates = r.rates;
    result.diag.mean_crlb_theta = r.mean_crlb_theta;
    result.diag.mean_crlb_d = r.mean_crlb_d;
    result.diag.constraint_ok = r.constraint_ok;

    const KinematicsNoise kin = cfg_.kinematics_noise();
    for (auto& s : true_states_) s = evolve(s, cfg_.slot_duration_s, kin, rng_);
    measure_all(plan, &result.diag);

    ++n_;
    bool all_out = true;
    for (const auto& s : true_states_)
        if (s.d <= cfg_.coverage_max_m) all_out = false;
    result.done = (n_ >= cfg_.episode_steps) || all_out;
    if (result.done) active_ = false;
    result.observation = observation();
    return result;
}

}  // namespace isacspike
