// SPDX-License-Identifier: Apache-2.0

#include "isacspike/config.hpp"

#include "isacspike/snn.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace isacspike {

LinkConstants ScenarioConfig::link_constants() const {
    LinkConstants c;
    c.n_tx = n_tx_antennas;
    c.n_rx = n_rx_antennas;
    c.carrier_hz = carrier_hz;
    c.noise_sense_w = dbm_to_watts(noise_sense_dbm);
    c.noise_comm_w = dbm_to_watts(noise_comm_dbm);
    c.fading = {fading_re, fading_im};
    c.pathloss_ref = db_to_linear(pathloss_ref_db);
    c.pathloss_ref_dist_m = pathloss_ref_dist_m;
    c.pathloss_exp = pathloss_exp;
    c.matched_gain = matched_gain;
    return c;
}

MeasurementNoiseParams ScenarioConfig::noise_params() const {
    MeasurementNoiseParams p;
    p.alpha_tau = alpha_tau;
    p.alpha_mu = alpha_mu;
    p.echo_noise_includes_interference = echo_noise_includes_interference;
    return p;
}

KinematicsNoise ScenarioConfig::kinematics_noise() const {
    return KinematicsNoise{sigma_theta_rad(), sigma_d_m, sigma_v_mps};
}

void ScenarioConfig::validate() const {
    if (n_vehicles < 1) throw std::invalid_argument("config: n_vehicles must be >= 1");
    if (initial_x.size() != static_cast<std::size_t>(n_vehicles) ||
        initial_y.size() != static_cast<std::size_t>(n_vehicles))
        throw std::invalid_argument("config: initial positions must list one (x, y) per vehicle");
    if (episode_steps < 1) throw std::invalid_argument("config: episode_steps must be >= 1");
    if (batch_size < 1 || minibatch_size < 1 || minibatch_size > batch_size)
        throw std::invalid_argument("config: invalid batch/minibatch sizes");
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("config: discount must lie in (0, 1)");
    if (!(clip_epsilon > 0.0)) throw std::invalid_argument("config: clip_epsilon must be positive");
    if (velocity_min_mps > velocity_max_mps)
        throw std::invalid_argument("config: velocity_min_mps exceeds velocity_max_mps");
    if (value_scale <= 0.0) throw std::invalid_argument("config: value_scale must be positive");
    if (checkpoint_every < 1) throw std::invalid_argument("config: checkpoint_every must be >= 1");
    if (plateau_window < 1) throw std::invalid_argument("config: plateau_window must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    link_constants().validate();
    LifParams lif{lif_leak, lif_threshold, lif_reset, snn_steps, surrogate_eta};
    lif.validate();
    for (double y : initial_y)
        if (!(y > 0.0)) throw std::invalid_argument("config: initial y must be positive (one road side)");
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_vec(const Vec& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

Vec parse_vec(const std::string& text, const std::string& key) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: field '" + key + "' has a malformed number: " + item);
        }
    }
    if (out.empty()) throw std::invalid_argument("config: field '" + key + "' is empty");
    return out;
}

struct FieldBinding {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
    const char* section;
};

template <typename T>
void assign_scalar(T& field, const std::string& value, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1")
                field = true;
            else if (value == "false" || value == "0")
                field = false;
            else
                throw std::invalid_argument("expected true/false");
        } else if constexpr (std::is_same_v<T, int>) {
            field = std::stoi(value);
        } else {
            field = std::stod(value);
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("config: field '" + key + "' has a malformed value: " + value);
    }
}

const std::map<std::string, FieldBinding>& field_table() {
    static const std::map<std::string, FieldBinding> table = [] {
        std::map<std::string, FieldBinding> t;
        auto add = [&t](const char* section, const char* key, auto member) {
            t[key] = FieldBinding{
                [member, key](ScenarioConfig& c, const std::string& v) {
                    assign_scalar(c.*member, v, key);
                },
                [member](const ScenarioConfig& c) {
                    using T = std::decay_t<decltype(c.*member)>;
                    if constexpr (std::is_same_v<T, bool>)
                        return std::string(c.*member ? "true" : "false");
                    else if constexpr (std::is_same_v<T, int>)
                        return std::to_string(c.*member);
                    else
                        return format_double(c.*member);
                },
                section};
        };
        auto add_vec = [&t](const char* section, const char* key, Vec ScenarioConfig::* member) {
            t[key] = FieldBinding{
                [member, key](ScenarioConfig& c, const std::string& v) { c.*member = parse_vec(v, key); },
                [member](const ScenarioConfig& c) { return format_vec(c.*member); }, section};
        };

        add("scenario", "n_vehicles", &ScenarioConfig::n_vehicles);
        add("scenario", "n_tx_antennas", &ScenarioConfig::n_tx_antennas);
        add("scenario", "n_rx_antennas", &ScenarioConfig::n_rx_antennas);
        add("scenario", "carrier_hz", &ScenarioConfig::carrier_hz);
        add("scenario", "slot_duration_s", &ScenarioConfig::slot_duration_s);
        add("scenario", "episode_steps", &ScenarioConfig::episode_steps);
        add("scenario", "noise_sense_dbm", &ScenarioConfig::noise_sense_dbm);
        add("scenario", "noise_comm_dbm", &ScenarioConfig::noise_comm_dbm);
        add("scenario", "fading_re", &ScenarioConfig::fading_re);
        add("scenario", "fading_im", &ScenarioConfig::fading_im);
        add("scenario", "matched_gain", &ScenarioConfig::matched_gain);
        add("scenario", "alpha_tau", &ScenarioConfig::alpha_tau);
        add("scenario", "alpha_mu", &ScenarioConfig::alpha_mu);
        add("scenario", "sigma_theta_deg", &ScenarioConfig::sigma_theta_deg);
        add("scenario", "sigma_d_m", &ScenarioConfig::sigma_d_m);
        add("scenario", "sigma_v_mps", &ScenarioConfig::sigma_v_mps);
        add("scenario", "p_max_dbm", &ScenarioConfig::p_max_dbm);
        add_vec("scenario", "initial_x", &ScenarioConfig::initial_x);
        add_vec("scenario", "initial_y", &ScenarioConfig::initial_y);
        add("scenario", "velocity_min_mps", &ScenarioConfig::velocity_min_mps);
        add("scenario", "velocity_max_mps", &ScenarioConfig::velocity_max_mps);
        add("scenario", "pathloss_ref_db", &ScenarioConfig::pathloss_ref_db);
        add("scenario", "pathloss_ref_dist_m", &ScenarioConfig::pathloss_ref_dist_m);
        add("scenario", "pathloss_exp", &ScenarioConfig::pathloss_exp);

        add("environment", "crlb_theta_threshold", &ScenarioConfig::crlb_theta_threshold);
        add("environment", "crlb_d_threshold", &ScenarioConfig::crlb_d_threshold);
        add("environment", "steer_span_rad", &ScenarioConfig::steer_span_rad);
        add("environment", "coverage_max_m", &ScenarioConfig::coverage_max_m);
        add("environment", "fairness_standard", &ScenarioConfig::fairness_standard);
        add("environment", "echo_noise_includes_interference",
            &ScenarioConfig::echo_noise_includes_interference);
        add("environment", "obs_theta_scale", &ScenarioConfig::obs_theta_scale);
        add("environment", "obs_dist_scale", &ScenarioConfig::obs_dist_scale);
        add("environment", "obs_vel_scale", &ScenarioConfig::obs_vel_scale);
        add("environment", "obs_sinr_scale", &ScenarioConfig::obs_sinr_scale);

        add("learning", "batch_size", &ScenarioConfig::batch_size);
        add("learning", "minibatch_size", &ScenarioConfig::minibatch_size);
        add("learning", "update_epochs", &ScenarioConfig::update_epochs);
        add("learning", "discount", &ScenarioConfig::discount);
        add("learning", "clip_epsilon", &ScenarioConfig::clip_epsilon);
        add("learning", "lr_actor", &ScenarioConfig::lr_actor);
        add("learning", "lr_critic", &ScenarioConfig::lr_critic);
        add("learning", "grad_clip", &ScenarioConfig::grad_clip);
        add("learning", "normalize_advantages", &ScenarioConfig::normalize_advantages);
        add("learning", "value_scale", &ScenarioConfig::value_scale);
        add("learning", "log_std_init", &ScenarioConfig::log_std_init);
        add("learning", "hidden_neurons", &ScenarioConfig::hidden_neurons);
        add("learning", "hidden_init_gain_snn", &ScenarioConfig::hidden_init_gain_snn);
        add("learning", "hidden_init_gain_dense", &ScenarioConfig::hidden_init_gain_dense);
        add("learning", "policy_output_gain", &ScenarioConfig::policy_output_gain);
        add("learning", "critic_output_gain", &ScenarioConfig::critic_output_gain);

        add("spiking", "snn_steps", &ScenarioConfig::snn_steps);
        add("spiking", "surrogate_eta", &ScenarioConfig::surrogate_eta);
        add("spiking", "lif_threshold", &ScenarioConfig::lif_threshold);
        add("spiking", "lif_reset", &ScenarioConfig::lif_reset);
        add("spiking", "lif_leak", &ScenarioConfig::lif_leak);

        add("run", "iterations", &ScenarioConfig::iterations);
        add("run", "smoke_iterations", &ScenarioConfig::smoke_iterations);
        add("run", "checkpoint_every", &ScenarioConfig::checkpoint_every);
        add("run", "plateau_window", &ScenarioConfig::plateau_window);
        add("run", "plateau_min_gain", &ScenarioConfig::plateau_min_gain);
        add("run", "workers", &ScenarioConfig::workers);
        add("run", "train_cost_multiplier", &ScenarioConfig::train_cost_multiplier);
        add("run", "sweep_iterations", &ScenarioConfig::sweep_iterations);
        add("run", "sweep_eval_episodes", &ScenarioConfig::sweep_eval_episodes);
        add("run", "eval_episodes", &ScenarioConfig::eval_episodes);
        return t;
    }();
    return table;
}

}  // namespace

std::string ScenarioConfig::serialize() const {
    // Canonical section ordering keeps the hash stable.
    const char* sections[] = {"scenario", "environment", "learning", "spiking", "run"};
    std::string out;
    for (const char* section : sections) {
        out += "[";
        out += section;
        out += "]\n";
        for (const auto& [key, binding] : field_table()) {
            if (std::string(binding.section) != section) continue;
            out += key;
            out += " = ";
            out += binding.get(*this);
            out += "\n";
        }
    }
    return out;
}

std::uint64_t ScenarioConfig::hash() const {
    // FNV-1a over the canonical serialization, excluding the [run] section:
    // orchestration knobs (iteration budget, checkpoint cadence, workers) may
    // change across resumes without invalidating a checkpoint.
    const std::string text = serialize();
    const auto run_pos = text.find("[run]");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < std::min(run_pos, text.size()); ++i) {
        h ^= static_cast<unsigned char>(text[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        auto trim = [](std::string s) {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string::npos) return std::string();
            const auto last = s.find_last_not_of(" \t\r");
            return s.substr(first, last - first + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') continue;  // sections are cosmetic; keys are unique
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not a key = value pair: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = field_table().find(key);
        if (it == field_table().end())
            throw std::invalid_argument("config: unknown field '" + key + "' on line " +
                                        std::to_string(line_no));
        it->second.set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    if (path.empty()) {
        ScenarioConfig cfg;
        cfg.validate();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace isacspike
