// SPDX-License-Identifier: Apache-2.0
//
// Link-level quantities of the downlink: reflection and path-loss
// coefficients, sensing and communication SINR, sum-rate, and fairness.

#ifndef ISACSPIKE_CHANNEL_HPP_
#define ISACSPIKE_CHANNEL_HPP_

#include "isacspike/common.hpp"

namespace isacspike {

struct LinkConstants {
    int n_tx = 32;                       // transmit antennas
    int n_rx = 32;                       // receive antennas
    double carrier_hz = 30e9;            // carrier frequency
    double noise_sense_w = 1e-11;        // echo noise power (-80 dBm)
    double noise_comm_w = 1e-11;         // downlink noise power (-80 dBm)
    Complex fading = {10.0, 10.0};       // reflection fading coefficient
    double pathloss_ref = 6.30957344480193e-7;  // linear gain at ref distance (-62 dB)
    double pathloss_ref_dist_m = 1.0;
    double pathloss_exp = 2.4;
    double matched_gain = 10.0;          // matched-filter gain

    double sense_array_gain() const { return std::sqrt(double(n_tx) * double(n_rx)); }
    double comm_array_gain() const { return std::sqrt(double(n_tx)); }

    void validate() const;
};

// One beam column plus transmit power per vehicle. Beams are unit norm and
// powers sum to at most the power budget.
struct BeamPlan {
    std::vector<CVec> beams;  // each length n_tx, ||f_k|| = 1
    Vec powers_w;             // each > 0

    std::size_t size() const { return beams.size(); }
    void validate(int n_tx, double p_max_w) const;
};

// Round-trip reflection coefficient kappa / (2 d).
Complex reflection_coefficient(double distance_m, const LinkConstants& c);

// Amplitude path loss sqrt(alpha0 * (d/d0)^-rho).
double path_loss_amp(double distance_m, const LinkConstants& c);

// Echo SINR for vehicle k under the given plan; interference from the other
// beams evaluated at vehicle k's angle.
double sensing_sinr(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                    const LinkConstants& c);

// Downlink SINR for vehicle k (one-way path loss, comm array gain).
double comm_sinr(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                 const LinkConstants& c);

struct RateReport {
    double total = 0.0;  // bits/s/Hz
    Vec per_vehicle;
};

RateReport sum_rate(const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                    const LinkConstants& c);

// Fairness index over per-vehicle rates. The default form carries a leading
// factor 2 (range [2/K, 2]); standard_form drops it (range [1/K, 1]).
double jain_index(const Vec& rates, bool standard_form = false);

}  // namespace isacspike

#endif  // ISACSPIKE_CHANNEL_HPP_
