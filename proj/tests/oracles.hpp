// SPDX-License-Identifier: Apache-2.0
//
// Test-only numerical oracles, independent of the library implementation
// paths they check.

#ifndef ISACSPIKE_TESTS_ORACLES_HPP_
#define ISACSPIKE_TESTS_ORACLES_HPP_

#include <cmath>

#include "isacspike/channel.hpp"
#include "isacspike/estimation.hpp"
#include "isacspike/rng.hpp"

namespace isacspike::oracles {

// Mean measurement vector g(x) = (complex echo gain, delay, Doppler) computed
// from first principles with plain loops. The estimation model is separable:
// the echo gain informs the angle only (the reflection amplitude is treated
// as a known coefficient, not a ranging channel), the delay informs the
// distance, and the Doppler informs the velocity with the angle factor held
// at the operating point. (theta0, d0) pin those non-designated appearances.
struct MeasurementMean {
    Complex echo;
    double delay;
    double doppler;
};

inline MeasurementMean measurement_mean(double theta, double d, double v, double theta0, double d0,
                                        const CVec& beam, double power_w, const LinkConstants& c) {
    const int n = static_cast<int>(beam.size());
    Complex steered(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
        const double phase = -kPi * m * std::cos(theta);
        const Complex a(std::cos(phase) / std::sqrt(double(n)), std::sin(phase) / std::sqrt(double(n)));
        steered += std::conj(a) * beam[m];
    }
    MeasurementMean g;
    const Complex beta = c.fading / (2.0 * d0);
    g.echo = std::sqrt(double(c.n_tx) * double(c.n_rx)) * std::sqrt(power_w) * beta *
             c.matched_gain * steered;
    g.delay = 2.0 * d / kSpeedOfLight;
    g.doppler = 2.0 * v * std::cos(theta0) * c.carrier_hz / kSpeedOfLight;
    return g;
}

// Gaussian log-likelihood of one measurement y given state x. The complex
// echo noise has per-component variance var_echo, matching the simulator.
inline double log_likelihood(const MeasurementMean& g, Complex y_echo, double y_delay,
                             double y_doppler, const MeasurementNoise& noise) {
    const double echo_term = std::norm(y_echo - g.echo) / (2.0 * noise.var_echo);
    const double delay_term =
        (y_delay - g.delay) * (y_delay - g.delay) / (2.0 * noise.var_delay);
    const double dopp_term =
        (y_doppler - g.doppler) * (y_doppler - g.doppler) / (2.0 * noise.var_doppler);
    return -(echo_term + delay_term + dopp_term);
}

// Monte-Carlo estimate of the Fisher information diagonal: expectation of the
// negated second derivative of the log-likelihood, with the curvature taken
// by central finite differences in each state coordinate.
struct FimOracle {
    double info_theta;
    double info_delay;
    double info_doppler;
};

inline FimOracle numerical_fim(double theta, double d, double v, const CVec& beam, double power_w,
                               const LinkConstants& c, const MeasurementNoise& noise, Rng& rng,
                               int draws = 256) {
    auto loglik = [&](double th, double dd, double vv, Complex ye, double yt, double ym) {
        return log_likelihood(measurement_mean(th, dd, vv, theta, d, beam, power_w, c), ye, yt, ym,
                              noise);
    };
    const MeasurementMean g0 = measurement_mean(theta, d, v, theta, d, beam, power_w, c);
    const double h_theta = 1e-6;
    const double h_d = 1e-6 * std::max(1.0, d);
    const double h_v = 1e-6 * std::max(1.0, std::abs(v));

    FimOracle acc{0.0, 0.0, 0.0};
    for (int i = 0; i < draws; ++i) {
        const Complex ye = g0.echo + rng.normal_complex(std::sqrt(noise.var_echo));
        const double yt = g0.delay + rng.normal(0.0, std::sqrt(noise.var_delay));
        const double ym = g0.doppler + rng.normal(0.0, std::sqrt(noise.var_doppler));
        const double base = loglik(theta, d, v, ye, yt, ym);
        acc.info_theta -= (loglik(theta + h_theta, d, v, ye, yt, ym) - 2.0 * base +
                           loglik(theta - h_theta, d, v, ye, yt, ym)) /
                          (h_theta * h_theta);
        acc.info_delay -= (loglik(theta, d + h_d, v, ye, yt, ym) - 2.0 * base +
                           loglik(theta, d - h_d, v, ye, yt, ym)) /
                          (h_d * h_d);
        acc.info_doppler -= (loglik(theta, d, v + h_v, ye, yt, ym) - 2.0 * base +
                             loglik(theta, d, v - h_v, ye, yt, ym)) /
                            (h_v * h_v);
    }
    acc.info_theta /= draws;
    acc.info_delay /= draws;
    acc.info_doppler /= draws;
    return acc;
}

}  // namespace isacspike::oracles

#endif  // ISACSPIKE_TESTS_ORACLES_HPP_
