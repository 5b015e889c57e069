// SPDX-License-Identifier: Apache-2.0
//
// Vehicle kinematics and the downlink decision process: observations built
// from noisy echo estimates, beam/power decoding, and the fairness-weighted
// rate reward gated by the sensing bounds.

#ifndef ISACSPIKE_WORLD_HPP_
#define ISACSPIKE_WORLD_HPP_

#include "isacspike/config.hpp"
#include "isacspike/env.hpp"
#include "isacspike/estimation.hpp"

namespace isacspike {

// One kinematics update: the vehicle advances along the road for one slot.
VehicleState evolve(const VehicleState& s, double dt, const KinematicsNoise& noise, Rng& rng);

// Initial true states from the configured (x, y) positions; velocities drawn
// uniformly. The angle convention cos(theta) = -x/d makes an approaching
// vehicle shrink its range.
std::vector<VehicleState> init_episode(const ScenarioConfig& cfg, Rng& rng);

struct BeamAction {
    Vec steer_angles;  // radians, one per vehicle
    Vec power_logits;
};

// Raw policy outputs (2K reals) to a feasible beam plan: angles are bounded
// excursions around the previous angle estimates, powers a softmax share of
// the budget.
BeamPlan decode_action(const Vec& raw, const Vec& prev_theta_hat, const ScenarioConfig& cfg,
                       BeamAction* decoded = nullptr);

struct RewardInfo {
    double reward = 0.0;
    double sum_rate = 0.0;
    Vec rates;
    double fairness = 0.0;
    double mean_crlb_theta = 0.0;
    double mean_crlb_d = 0.0;
    bool constraint_ok = true;
};

// Indicator-gated reward: rate-fairness product minus the mean sensing bounds,
// zero whenever a bound exceeds its threshold.
RewardInfo reward(const BeamPlan& plan, const std::vector<VehicleState>& true_states,
                  const ScenarioConfig& cfg);

// The downlink environment: step decodes the action, scores it against the
// current true states, advances the vehicles, and measures them for the next
// observation.
class IsacEnv final : public Environment {
  public:
    IsacEnv(const ScenarioConfig& cfg, std::uint64_t seed);

    int observation_dim() const override { return cfg_.observation_dim(); }
    int action_dim() const override { return cfg_.action_dim(); }
    Vec reset() override;
    StepResult step(const Vec& raw_action) override;

    const std::vector<VehicleState>& true_states() const { return true_states_; }
    const std::vector<EstimatedVehicleState>& estimates() const { return estimates_; }
    int current_step() const { return n_; }

  private:
    Vec observation() const;
    void measure_all(const BeamPlan& plan, StepDiag* diag);

    ScenarioConfig cfg_;
    LinkConstants link_;
    Rng rng_;
    std::vector<VehicleState> true_states_;
    std::vector<EstimatedVehicleState> estimates_;
    int n_ = 0;
    bool active_ = false;
};

}  // namespace isacspike

#endif  // ISACSPIKE_WORLD_HPP_
