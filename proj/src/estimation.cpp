// SPDX-License-Identifier: Apache-2.0

#include "isacspike/estimation.hpp"

#include <cmath>

#include "isacspike/array_geometry.hpp"

namespace isacspike {

namespace {

// Signal and interference terms of the echo, shared by the variance and SINR
// paths.
struct EchoTerms {
    double signal = 0.0;
    double interference = 0.0;
    double own_gain2 = 0.0;  // |a^H(theta_k) f_k|^2
};

EchoTerms echo_terms(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                     const LinkConstants& c) {
    if (k >= plan.size() || plan.size() != thetas.size() || plan.size() != dists.size())
        throw std::invalid_argument("noise_variances: index out of range or mismatched lists");
    EchoTerms t;
    const double gain2 = c.sense_array_gain() * c.sense_array_gain();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double beta2 = std::norm(reflection_coefficient(dists[i], c));
        const double cross = std::norm(beam_gain(thetas[k], plan.beams[i]));
        const double term = gain2 * plan.powers_w[i] * beta2 * cross;
        if (i == k) {
            t.signal = term;
            t.own_gain2 = cross;
        } else {
            t.interference += term;
        }
    }
    return t;
}

}  // namespace

MeasurementNoise noise_variances(std::size_t k, const BeamPlan& plan, const Vec& thetas,
                                 const Vec& dists, const LinkConstants& c,
                                 const MeasurementNoiseParams& p) {
    const EchoTerms t = echo_terms(k, plan, thetas, dists, c);
    MeasurementNoise out;
    out.alpha_tau = p.alpha_tau;
    out.alpha_mu = p.alpha_mu;
    out.var_echo = c.matched_gain *
                   (p.echo_noise_includes_interference ? t.interference + c.noise_sense_w
                                                       : c.noise_sense_w);
    if (t.own_gain2 < kBeamLossThreshold) {
        // Sensing lost: report the capped bounds instead of near-infinite
        // variances so the environment sees a finite, very bad measurement.
        out.capped = true;
        out.var_delay = 4.0 * kCrlbDistCap / (kSpeedOfLight * kSpeedOfLight);
        const double doppler_scale = 2.0 * c.carrier_hz / kSpeedOfLight;
        out.var_doppler = doppler_scale * doppler_scale * 1e6;  // (10^3 m/s)^2 equivalent
        return out;
    }
    const double ratio = (t.interference + c.noise_sense_w) / t.signal;
    out.var_delay = p.alpha_tau * p.alpha_tau * ratio;
    out.var_doppler = p.alpha_mu * p.alpha_mu * ratio;
    return out;
}

FisherInfo fim(double theta, double d, const CVec& beam, double power_w, const LinkConstants& c,
               const MeasurementNoise& noise) {
    if (!(d > 0.0)) throw std::domain_error("fim: distance must be positive");
    if (!(power_w > 0.0)) throw std::invalid_argument("fim: power must be positive");
    if (!(noise.var_delay > 0.0 && noise.var_doppler > 0.0 && noise.var_echo > 0.0))
        throw std::invalid_argument("fim: noise variances must be positive");

    FisherInfo f;
    // d(echo gain)/d(theta) = E sqrt(p) beta xi (da/dtheta)^H f
    const CVec da = steering_derivative(theta, static_cast<int>(beam.size()));
    Complex deriv_gain(0.0, 0.0);
    for (std::size_t m = 0; m < beam.size(); ++m)
        deriv_gain += std::conj(da[m]) * beam[m];
    const Complex beta = reflection_coefficient(d, c);
    const Complex dy_dtheta =
        c.sense_array_gain() * std::sqrt(power_w) * beta * c.matched_gain * deriv_gain;
    f.info_theta = std::norm(dy_dtheta) / noise.var_echo;
    f.theta_singular = !(f.info_theta > 0.0);

    const double delay_slope = 2.0 / kSpeedOfLight;
    f.info_delay = delay_slope * delay_slope / noise.var_delay;

    const double cos_theta = std::abs(std::cos(theta)) < 1e-9 ? 0.0 : std::cos(theta);
    const double doppler_slope = 2.0 * c.carrier_hz * cos_theta / kSpeedOfLight;
    f.info_doppler = doppler_slope * doppler_slope / noise.var_doppler;
    f.doppler_singular = !(f.info_doppler > 0.0);
    return f;
}

CrlbValue crlb_theta(double theta, double d, const CVec& beam, double power_w,
                     const LinkConstants& c, const MeasurementNoise& noise) {
    const FisherInfo f = fim(theta, d, beam, power_w, c, noise);
    CrlbValue out;
    if (f.info_theta * kCrlbThetaCap > 1.0) {
        out.value = 1.0 / f.info_theta;
    } else {
        out.value = kCrlbThetaCap;
        out.capped = true;
    }
    return out;
}

double crlb_d(const MeasurementNoise& noise) {
    return noise.var_delay * kSpeedOfLight * kSpeedOfLight / 4.0;
}

Measurement simulate_measurement(const VehicleState& s, const BeamPlan& plan, std::size_t k,
                                 const LinkConstants& c, const MeasurementNoise& noise, Rng& rng) {
    if (k >= plan.size()) throw std::invalid_argument("simulate_measurement: index out of range");
    Measurement m;
    m.delay = 2.0 * s.d / kSpeedOfLight;
    if (noise.var_delay > 0.0) m.delay += rng.normal(0.0, std::sqrt(noise.var_delay));
    m.doppler = 2.0 * s.v * std::cos(s.theta) * c.carrier_hz / kSpeedOfLight;
    if (noise.var_doppler > 0.0) m.doppler += rng.normal(0.0, std::sqrt(noise.var_doppler));
    const Complex beta = reflection_coefficient(s.d, c);
    m.echo_gain = c.sense_array_gain() * std::sqrt(plan.powers_w[k]) * beta * c.matched_gain *
                  beam_gain(s.theta, plan.beams[k]);
    if (noise.var_echo > 0.0) m.echo_gain += rng.normal_complex(std::sqrt(noise.var_echo));
    return m;
}

EstimatedVehicleState estimate_state(const Measurement& m, const BeamPlan& plan, std::size_t k,
                                     const VehicleState& true_state,
                                     const EstimatedVehicleState& prev, const LinkConstants& c,
                                     const MeasurementNoise& noise, Rng& rng) {
    if (k >= plan.size()) throw std::invalid_argument("estimate_state: index out of range");
    EstimatedVehicleState est;
    est.d_hat = std::max(kSpeedOfLight * m.delay / 2.0, 0.5);

    est.theta_hat = true_state.theta;
    if (noise.var_echo > 0.0) {
        const CrlbValue bound =
            crlb_theta(true_state.theta, true_state.d, plan.beams[k], plan.powers_w[k], c, noise);
        est.theta_hat += rng.normal(0.0, std::sqrt(bound.value));
    }
    est.theta_hat = clamp(est.theta_hat, 0.01, kPi - 0.01);

    const double cos_hat = std::cos(est.theta_hat);
    if (std::abs(cos_hat) < 0.05) {
        est.v_hat = prev.v_hat;
        est.v_unreliable = true;
    } else {
        est.v_hat = m.doppler * kSpeedOfLight / (2.0 * c.carrier_hz * cos_hat);
    }
    est.prev_comm_sinr = prev.prev_comm_sinr;
    return est;
}

}  // namespace isacspike
