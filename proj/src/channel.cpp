// SPDX-License-Identifier: Apache-2.0

#include "isacspike/channel.hpp"

#include <cmath>

#include "isacspike/array_geometry.hpp"

namespace isacspike {

void LinkConstants::validate() const {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("LinkConstants: antenna counts must be >= 1");
    if (noise_sense_w <= 0.0 || noise_comm_w <= 0.0)
        throw std::invalid_argument("LinkConstants: noise powers must be positive");
    if (pathloss_exp < 0.0) throw std::invalid_argument("LinkConstants: path loss exponent must be >= 0");
    if (matched_gain <= 0.0) throw std::invalid_argument("LinkConstants: matched gain must be positive");
}

void BeamPlan::validate(int n_tx, double p_max_w) const {
    if (beams.size() != powers_w.size())
        throw std::invalid_argument("BeamPlan: beams/powers length mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < beams.size(); ++k) {
        if (beams[k].size() != static_cast<std::size_t>(n_tx))
            throw std::invalid_argument("BeamPlan: beam length != n_tx");
        if (std::abs(std::sqrt(squared_norm(beams[k])) - 1.0) > 1e-9)
            throw std::invalid_argument("BeamPlan: beam is not unit norm");
        if (!(powers_w[k] > 0.0)) throw std::invalid_argument("BeamPlan: powers must be positive");
        total += powers_w[k];
    }
    if (total > p_max_w + 1e-9) throw std::invalid_argument("BeamPlan: power budget exceeded");
}

Complex reflection_coefficient(double distance_m, const LinkConstants& c) {
    if (!(distance_m > 0.0)) throw std::domain_error("reflection_coefficient: distance must be positive");
    return c.fading / (2.0 * distance_m);
}

double path_loss_amp(double distance_m, const LinkConstants& c) {
    if (!(distance_m > 0.0)) throw std::domain_error("path_loss_amp: distance must be positive");
    return std::sqrt(c.pathloss_ref * std::pow(distance_m / c.pathloss_ref_dist_m, -c.pathloss_exp));
}

namespace {

void check_index(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists) {
    if (k >= plan.size() || plan.size() != thetas.size() || plan.size() != dists.size())
        throw std::invalid_argument("sinr: vehicle index out of range or mismatched lists");
}

}  // namespace

double sensing_sinr(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                    const LinkConstants& c) {
    check_index(k, plan, thetas, dists);
    const double gain2 = c.sense_array_gain() * c.sense_array_gain();
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double beta2 = std::norm(reflection_coefficient(dists[i], c));
        const double cross = std::norm(beam_gain(thetas[k], plan.beams[i]));
        const double term = gain2 * plan.powers_w[i] * beta2 * cross;
        if (i == k)
            signal = term;
        else
            interference += term;
    }
    return signal / (interference + c.noise_sense_w);
}

double comm_sinr(std::size_t k, const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                 const LinkConstants& c) {
    check_index(k, plan, thetas, dists);
    const double gain2 = c.comm_array_gain() * c.comm_array_gain();
    const double alpha2 = path_loss_amp(dists[k], c) * path_loss_amp(dists[k], c);
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double cross = std::norm(beam_gain(thetas[k], plan.beams[i]));
        const double term = gain2 * plan.powers_w[i] * alpha2 * cross;
        if (i == k)
            signal = term;
        else
            interference += term;
    }
    return signal / (interference + c.noise_comm_w);
}

RateReport sum_rate(const BeamPlan& plan, const Vec& thetas, const Vec& dists,
                    const LinkConstants& c) {
    RateReport report;
    report.per_vehicle.resize(plan.size());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        report.per_vehicle[k] = std::log2(1.0 + comm_sinr(k, plan, thetas, dists, c));
        report.total += report.per_vehicle[k];
    }
    return report;
}

double jain_index(const Vec& rates, bool standard_form) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double r : rates) {
        sum += r;
        sum_sq += r * r;
    }
    if (sum_sq <= 0.0) throw std::domain_error("jain_index: undefined for all-zero rates");
    const double base = sum * sum / (static_cast<double>(rates.size()) * sum_sq);
    return standard_form ? base : 2.0 * base;
}

}  // namespace isacspike
