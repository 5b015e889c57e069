// SPDX-License-Identifier: Apache-2.0
//
// Operation counting and energy estimation. Spiking synapses cost one
// accumulate per presented spike; dense synapses cost one multiply-accumulate.

#ifndef ISACSPIKE_ENERGY_HPP_
#define ISACSPIKE_ENERGY_HPP_

#include <cstdint>

#include "isacspike/common.hpp"
#include "isacspike/snn.hpp"

namespace isacspike {

inline constexpr double kEnergyAcPj = 0.1;
inline constexpr double kEnergyMacPj = 3.2;

// Spike-weighted synapse count per time step over the two hidden weight
// layers: sum of N_i * M_i * rate_i. Expects exactly three weight layers with
// rates for the first two.
double flops_spiking(const std::vector<std::pair<int, int>>& layer_dims, const Vec& firing_rates);

// Per-forward energy in joules: AC ops for the time-unrolled hidden layers
// plus MAC ops for the readout.
double energy_spiking(double flops_spiking_value, int steps, std::pair<int, int> readout_dims,
                      double e_ac_pj = kEnergyAcPj, double e_mac_pj = kEnergyMacPj);

// Dense baseline per-forward energy: MAC ops over all weight layers.
double energy_dense(const std::vector<std::pair<int, int>>& layer_dims,
                    double e_mac_pj = kEnergyMacPj);

enum class EnergyContext { train, inference };

struct EnergyLedger {
    EnergyContext context = EnergyContext::inference;
    double ac_ops = 0.0;
    double mac_ops = 0.0;
    double e_ac_pj = kEnergyAcPj;
    double e_mac_pj = kEnergyMacPj;
    std::uint64_t passes = 0;

    // Training passes are charged as 2x a forward (forward + backward).
    double train_cost_multiplier = 2.0;

    // Spiking pass: firing rates measured from the trace, never assumed.
    void record_forward(const Network& net, const SpikeTrace& trace, bool training = false);
    // Dense pass.
    void record_forward(const Network& net, bool training = false);

    void merge(const EnergyLedger& other);
    double energy_joules() const { return (ac_ops * e_ac_pj + mac_ops * e_mac_pj) * 1e-12; }
};

}  // namespace isacspike

#endif  // ISACSPIKE_ENERGY_HPP_
