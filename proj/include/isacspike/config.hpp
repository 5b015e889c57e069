// SPDX-License-Identifier: Apache-2.0
//
// Scenario and training configuration. Defaults reproduce the reference
// simulation settings; a config file only needs to list overrides.

#ifndef ISACSPIKE_CONFIG_HPP_
#define ISACSPIKE_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "isacspike/channel.hpp"
#include "isacspike/estimation.hpp"
#include "isacspike/vehicle_state.hpp"

namespace isacspike {

struct ScenarioConfig {
    // -- scenario ----------------------------------------------------------
    int n_vehicles = 3;
    int n_tx_antennas = 32;
    int n_rx_antennas = 32;
    double carrier_hz = 30e9;
    double slot_duration_s = 0.02;
    int episode_steps = 100;
    double noise_sense_dbm = -80.0;
    double noise_comm_dbm = -80.0;
    double fading_re = 10.0;
    double fading_im = 10.0;
    double matched_gain = 10.0;
    double alpha_tau = 1e-9;
    double alpha_mu = 2e3;
    double sigma_theta_deg = 0.02;
    double sigma_d_m = 0.2;
    double sigma_v_mps = 0.5;
    double p_max_dbm = 40.0;
    // Initial positions (x, y) in meters relative to the roadside unit.
    Vec initial_x = {-5.0, -15.0, -25.0};
    Vec initial_y = {10.0, 10.0, 10.0};
    double velocity_min_mps = 10.0;
    double velocity_max_mps = 14.0;

    // Path loss: 30 GHz free-space reference at 1 m, urban exponent.
    double pathloss_ref_db = -62.0;
    double pathloss_ref_dist_m = 1.0;
    double pathloss_exp = 2.4;

    // -- environment decisions ----------------------------------------------
    double crlb_theta_threshold = 0.1;  // rad^2
    double crlb_d_threshold = 1.0;      // m^2
    double steer_span_rad = 0.6;
    double coverage_max_m = 80.0;
    bool fairness_standard = false;  // drop the leading factor 2 of the default form
    bool echo_noise_includes_interference = false;
    // Observation normalization scales.
    double obs_theta_scale = 1.0 / kPi;
    double obs_dist_scale = 1.0 / 50.0;
    double obs_vel_scale = 1.0 / 20.0;
    double obs_sinr_scale = 1.0 / 10.0;

    // -- learning -----------------------------------------------------------
    int batch_size = 512;
    int minibatch_size = 16;
    int update_epochs = 4;
    double discount = 0.99;
    double clip_epsilon = 0.2;
    double lr_actor = 5e-5;
    double lr_critic = 5e-4;
    double grad_clip = 0.5;
    bool normalize_advantages = true;
    double value_scale = 1000.0;  // critic regresses returns / value_scale
    double log_std_init = -1.2;
    int hidden_neurons = 128;
    double hidden_init_gain_snn = 4.0;
    double hidden_init_gain_dense = 1.0;
    double policy_output_gain = 0.01;
    double critic_output_gain = 1.0;

    // -- spiking -------------------------------------------------------------
    int snn_steps = 6;
    double surrogate_eta = 3.0;
    double lif_threshold = 1.0;
    double lif_reset = 0.0;
    double lif_leak = 0.5;

    // -- run control ----------------------------------------------------------
    int iterations = 2000;
    int smoke_iterations = 50;
    int checkpoint_every = 100;
    int plateau_window = 200;
    double plateau_min_gain = 0.01;
    int workers = 1;
    double train_cost_multiplier = 2.0;
    int sweep_iterations = 200;
    int sweep_eval_episodes = 5;
    int eval_episodes = 10;

    // -- derived -------------------------------------------------------------
    double p_max_w() const { return dbm_to_watts(p_max_dbm); }
    double sigma_theta_rad() const { return sigma_theta_deg * kPi / 180.0; }
    LinkConstants link_constants() const;
    MeasurementNoiseParams noise_params() const;
    KinematicsNoise kinematics_noise() const;
    int observation_dim() const { return 4 * n_vehicles; }
    int action_dim() const { return 2 * n_vehicles; }

    void validate() const;
    std::uint64_t hash() const;
    std::string serialize() const;
};

// Parses a flat "key = value" file with [section] headers; keys must match a
// known field. Empty path or empty file yields defaults.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

}  // namespace isacspike

#endif  // ISACSPIKE_CONFIG_HPP_
