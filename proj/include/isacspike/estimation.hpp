// SPDX-License-Identifier: Apache-2.0
//
// Measurement statistics of the echo channel: noise variances, Fisher
// information, Cramer-Rao bounds, and the simulated estimator that feeds the
// agent's observations.

#ifndef ISACSPIKE_ESTIMATION_HPP_
#define ISACSPIKE_ESTIMATION_HPP_

#include "isacspike/channel.hpp"
#include "isacspike/rng.hpp"
#include "isacspike/vehicle_state.hpp"

namespace isacspike {

struct MeasurementNoiseParams {
    double alpha_tau = 1e-9;  // seconds
    double alpha_mu = 2e3;    // Hz
    // Echo-gain noise model: var_echo = matched_gain * noise_sense_w, optionally
    // with the inter-beam interference folded in.
    bool echo_noise_includes_interference = false;
};

struct MeasurementNoise {
    double var_delay = 0.0;    // s^2
    double var_doppler = 0.0;  // Hz^2
    double var_echo = 0.0;     // per-component variance of the complex echo noise
    double alpha_tau = 0.0;
    double alpha_mu = 0.0;
    bool capped = false;  // beam effectively orthogonal to the vehicle
};

struct Measurement {
    double delay = 0.0;    // seconds
    double doppler = 0.0;  // Hz
    Complex echo_gain;
};

struct EstimatedVehicleState {
    double theta_hat = 0.0;     // radians, clamped to (0.01, pi - 0.01)
    double d_hat = 0.0;         // meters
    double v_hat = 0.0;         // m/s
    double prev_comm_sinr = 0.0;
    bool v_unreliable = false;  // broadside: Doppler carries no information
};

// Caps applied when the beam misses the vehicle (gain below 1e-6 of matched):
// the bound values map to (10 rad)^2 and (10^3 m)^2.
inline constexpr double kCrlbThetaCap = 100.0;   // rad^2
inline constexpr double kCrlbDistCap = 1e6;      // m^2
inline constexpr double kBeamLossThreshold = 1e-6;

// Delay/Doppler measurement variances alpha^2 / sensing SINR, plus the echo
// noise variance.
MeasurementNoise noise_variances(std::size_t k, const BeamPlan& plan, const Vec& thetas,
                                 const Vec& dists, const LinkConstants& c,
                                 const MeasurementNoiseParams& p);

struct FisherInfo {
    double info_theta = 0.0;    // 1/rad^2
    double info_delay = 0.0;    // information about distance via delay
    double info_doppler = 0.0;  // information about velocity via Doppler
    bool theta_singular = false;
    bool doppler_singular = false;  // broadside, cos(theta) = 0
};

// Diagonal Fisher information of the (echo gain, delay, Doppler) measurement
// for the (theta, d, v) parameters.
FisherInfo fim(double theta, double d, const CVec& beam, double power_w, const LinkConstants& c,
               const MeasurementNoise& noise);

// 1 / information, capped + flagged when the beam carries no angle information.
struct CrlbValue {
    double value = 0.0;
    bool capped = false;
};

CrlbValue crlb_theta(double theta, double d, const CVec& beam, double power_w,
                     const LinkConstants& c, const MeasurementNoise& noise);

// Distance bound sigma_tau^2 * c^2 / 4 (independent of the beam given the
// delay variance).
double crlb_d(const MeasurementNoise& noise);

// Draws one noisy (delay, Doppler, echo gain) measurement of the true state.
Measurement simulate_measurement(const VehicleState& true_state, const BeamPlan& plan,
                                 std::size_t k, const LinkConstants& c,
                                 const MeasurementNoise& noise, Rng& rng);

// Efficient-estimator model: distance from the delay, angle as a CRLB-variance
// draw around the truth, velocity from Doppler inversion with a broadside
// hold of the previous estimate.
EstimatedVehicleState estimate_state(const Measurement& m, const BeamPlan& plan, std::size_t k,
                                     const VehicleState& true_state,
                                     const EstimatedVehicleState& prev, const LinkConstants& c,
                                     const MeasurementNoise& noise, Rng& rng);

}  // namespace isacspike

#endif  // ISACSPIKE_ESTIMATION_HPP_
