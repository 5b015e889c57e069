// SPDX-License-Identifier: Apache-2.0

#ifndef ISACSPIKE_COMMON_HPP_
#define ISACSPIKE_COMMON_HPP_

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace isacspike {

using Vec = std::vector<double>;
using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double squared_norm(const CVec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

}  // namespace isacspike

#endif  // ISACSPIKE_COMMON_HPP_
