// SPDX-License-Identifier: Apache-2.0

#ifndef ISACSPIKE_VEHICLE_STATE_HPP_
#define ISACSPIKE_VEHICLE_STATE_HPP_

namespace isacspike {

// Ground-truth kinematic state of one vehicle relative to the roadside unit.
struct VehicleState {
    double theta = 0.0;  // radians, (0, pi)
    double d = 0.0;      // meters, > 0
    double v = 0.0;      // m/s, > 0
};

struct KinematicsNoise {
    double sigma_theta = 0.0;  // radians
    double sigma_d = 0.0;      // meters
    double sigma_v = 0.0;      // m/s
};

}  // namespace isacspike

#endif  // ISACSPIKE_VEHICLE_STATE_HPP_
