// SPDX-License-Identifier: Apache-2.0

#include "isacspike/array_geometry.hpp"

#include <cmath>
#include <string>

namespace isacspike {

namespace {

void check_angle(double theta) {
    if (!(theta > 0.0 && theta < kPi))
        throw std::domain_error("steering: theta must lie in (0, pi), got " + std::to_string(theta));
}

void check_antennas(int n) {
    if (n < 1) throw std::invalid_argument("steering: antenna count must be >= 1");
}

}  // namespace

SteeringVector steering(double theta, int n) {
    check_antennas(n);
    check_angle(theta);
    SteeringVector sv;
    sv.n_antennas = n;
    sv.theta = theta;
    sv.elements.resize(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double phase_step = -kPi * std::cos(theta);
    for (int m = 0; m < n; ++m)
        sv.elements[m] = std::polar(scale, phase_step * m);
    return sv;
}

CVec steering_derivative(double theta, int n) {
    check_antennas(n);
    check_angle(theta);
    CVec d(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double phase_step = -kPi * std::cos(theta);
    const double sin_theta = std::sin(theta);
    for (int m = 0; m < n; ++m) {
        const Complex phase = std::polar(scale, phase_step * m);
        d[m] = Complex(0.0, kPi * m * sin_theta) * phase;
    }
    return d;
}

Complex beam_gain(double theta, const CVec& f) {
    if (f.empty()) throw std::invalid_argument("beam_gain: empty beamforming vector");
    const SteeringVector sv = steering(theta, static_cast<int>(f.size()));
    Complex acc(0.0, 0.0);
    for (std::size_t m = 0; m < f.size(); ++m)
        acc += std::conj(sv.elements[m]) * f[m];
    return acc;
}

double orthogonality_defect(double theta1, double theta2, int n) {
    check_antennas(n);
    check_angle(theta1);
    check_angle(theta2);
    // Dirichlet kernel magnitude of the phase-step difference.
    Complex acc(0.0, 0.0);
    const double delta = kPi * (std::cos(theta1) - std::cos(theta2));
    for (int m = 0; m < n; ++m)
        acc += std::polar(1.0 / n, delta * m);
    return std::abs(acc);
}

}  // namespace isacspike
