// SPDX-License-Identifier: Apache-2.0

#include "isacspike/energy.hpp"

namespace isacspike {

double flops_spiking(const std::vector<std::pair<int, int>>& layer_dims, const Vec& firing_rates) {
    if (layer_dims.size() != 3)
        throw std::invalid_argument("flops_spiking: expected exactly three weight layers");
    if (firing_rates.size() < 2)
        throw std::invalid_argument("flops_spiking: need firing rates for the two hidden layers");
    double total = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double rate = firing_rates[i];
        if (!(rate >= 0.0 && rate <= 1.0))
            throw std::invalid_argument("flops_spiking: firing rate outside [0, 1]");
        total += static_cast<double>(layer_dims[i].first) * layer_dims[i].second * rate;
    }
    return total;
}

double energy_spiking(double flops_spiking_value, int steps, std::pair<int, int> readout_dims,
                      double e_ac_pj, double e_mac_pj) {
    const double ac = flops_spiking_value * static_cast<double>(steps);
    const double mac = static_cast<double>(readout_dims.first) * readout_dims.second;
    return (e_ac_pj * ac + e_mac_pj * mac) * 1e-12;
}

double energy_dense(const std::vector<std::pair<int, int>>& layer_dims, double e_mac_pj) {
    double mac = 0.0;
    for (const auto& [n, m] : layer_dims) mac += static_cast<double>(n) * m;
    return e_mac_pj * mac * 1e-12;
}

void EnergyLedger::record_forward(const Network& net, const SpikeTrace& trace, bool training) {
    const auto dims = net.layer_dims();
    const double mult = training ? train_cost_multiplier : 1.0;
    const double per_step = flops_spiking(dims, trace.firing_rates());
    ac_ops += mult * per_step * static_cast<double>(net.lif.steps);
    mac_ops += mult * static_cast<double>(dims.back().first) * dims.back().second;
    ++passes;
}

void EnergyLedger::record_forward(const Network& net, bool training) {
    const double mult = training ? train_cost_multiplier : 1.0;
    double mac = 0.0;
    for (const auto& [n, m] : net.layer_dims()) mac += static_cast<double>(n) * m;
    mac_ops += mult * mac;
    ++passes;
}

void EnergyLedger::merge(const EnergyLedger& other) {
    ac_ops += other.ac_ops;
    mac_ops += other.mac_ops;
    passes += other.passes;
}

}  // namespace isacspike
