// SPDX-License-Identifier: Apache-2.0
//
// Half-wavelength uniform linear array: steering vectors, their angle
// derivatives, and beam gain helpers. All functions are pure and thread-safe.

#ifndef ISACSPIKE_ARRAY_GEOMETRY_HPP_
#define ISACSPIKE_ARRAY_GEOMETRY_HPP_

#include "isacspike/common.hpp"

namespace isacspike {

struct SteeringVector {
    CVec elements;
    int n_antennas = 0;
    double theta = 0.0;  // radians, (0, pi)
};

// Element m of the unit-norm steering vector: (1/sqrt(n)) * exp(-j*pi*m*cos(theta)).
SteeringVector steering(double theta, int n);

// Analytic d/dtheta of steering(theta, n):
// element m = (1/sqrt(n)) * (j*pi*m*sin(theta)) * exp(-j*pi*m*cos(theta)).
CVec steering_derivative(double theta, int n);

// Conjugate-transpose inner product of the steering vector at theta with a
// beamforming vector of the same length.
Complex beam_gain(double theta, const CVec& f);

// |b(theta1)^H b(theta2)| in [0, 1]; 1 at equal angles, ~0 for angles
// separated beyond the Dirichlet main lobe.
double orthogonality_defect(double theta1, double theta2, int n);

}  // namespace isacspike

#endif  // ISACSPIKE_ARRAY_GEOMETRY_HPP_
