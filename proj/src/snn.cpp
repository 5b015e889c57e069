// SPDX-License-Identifier: Apache-2.0

#include "isacspike/snn.hpp"

#include <cmath>

namespace isacspike {

void affine(const Mat& w, const Vec& b, const Vec& x, Vec& y) {
    y.assign(w.rows, 0.0);
    const double* row = w.a.data();
    for (int r = 0; r < w.rows; ++r, row += w.cols) {
        double acc = b[r];
        for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void affine_transpose_accum(const Mat& w, const Vec& y_grad, Vec& x_grad) {
    const double* row = w.a.data();
    for (int r = 0; r < w.rows; ++r, row += w.cols) {
        const double g = y_grad[r];
        if (g == 0.0) continue;
        for (int c = 0; c < w.cols; ++c) x_grad[c] += row[c] * g;
    }
}

namespace {

// grad_w += outer(y_grad, x); grad_b += y_grad
void accumulate_affine_grads(Mat& grad_w, Vec& grad_b, const Vec& y_grad, const Vec& x) {
    double* row = grad_w.a.data();
    for (int r = 0; r < grad_w.rows; ++r, row += grad_w.cols) {
        const double g = y_grad[r];
        grad_b[r] += g;
        if (g == 0.0) continue;
        for (int c = 0; c < grad_w.cols; ++c) row[c] += g * x[c];
    }
}

void check_finite_input(const Vec& x, const char* what) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

}  // namespace

void LifParams::validate() const {
    if (!(leak > 0.0 && leak <= 1.0)) throw std::invalid_argument("LifParams: leak must be in (0, 1]");
    if (!(reset < threshold)) throw std::invalid_argument("LifParams: reset must be below threshold");
    if (steps < 1) throw std::invalid_argument("LifParams: steps must be >= 1");
    if (!(surrogate_eta > 0.0)) throw std::invalid_argument("LifParams: surrogate eta must be positive");
}

std::vector<std::pair<int, int>> Network::layer_dims() const {
    std::vector<std::pair<int, int>> dims;
    dims.reserve(weights.size());
    for (const auto& w : weights) dims.emplace_back(w.cols, w.rows);
    return dims;
}

Network make_network(NetKind kind, const std::vector<int>& dims, Rng& rng, double hidden_gain,
                     double output_gain) {
    if (dims.size() < 2) throw std::invalid_argument("make_network: need at least one weight layer");
    Network net;
    net.kind = kind;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Mat w(dims[l + 1], dims[l]);
        const bool last = (l + 2 == dims.size());
        const double gain = last ? output_gain : hidden_gain;
        const double std_dev = gain / std::sqrt(static_cast<double>(dims[l]));
        for (auto& x : w.a) x = rng.normal(0.0, std_dev);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(dims[l + 1], 0.0);
    }
    return net;
}

Vec SpikeTrace::firing_rates() const {
    Vec rates(spikes.size(), 0.0);
    for (std::size_t l = 0; l < spikes.size(); ++l) {
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& step : spikes[l]) {
            for (double s : step) total += s;
            count += step.size();
        }
        rates[l] = count ? total / static_cast<double>(count) : 0.0;
    }
    return rates;
}

GradientSet GradientSet::zeros_like(const Network& net) {
    GradientSet g;
    for (const auto& w : net.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void GradientSet::accumulate(const GradientSet& other, double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].a.size(); ++i) weights[l].a[i] += s * other.weights[l].a[i];
        for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += s * other.biases[l][i];
    }
}

void GradientSet::scale(double s) {
    for (auto& w : weights)
        for (auto& x : w.a) x *= s;
    for (auto& b : biases)
        for (auto& x : b) x *= s;
}

double GradientSet::squared_norm() const {
    double acc = 0.0;
    for (const auto& w : weights)
        for (double x : w.a) acc += x * x;
    for (const auto& b : biases)
        for (double x : b) acc += x * x;
    return acc;
}

bool GradientSet::all_finite() const {
    for (const auto& w : weights)
        for (double x : w.a)
            if (!std::isfinite(x)) return false;
    for (const auto& b : biases)
        for (double x : b)
            if (!std::isfinite(x)) return false;
    return true;
}

double surrogate_value(double x, double eta) {
    return std::atan(kPi * eta * 0.5 * x) / kPi + 0.5;
}

double surrogate_derivative(double x, double eta) {
    const double z = kPi * eta * 0.5 * x;
    return (eta * 0.5) / (1.0 + z * z);
}

LifLayerResult lif_layer_forward(const Mat& w, const Vec& b, std::span<const Vec> inputs_per_step,
                                 const LifParams& p, bool smoothed) {
    p.validate();
    if (inputs_per_step.size() != static_cast<std::size_t>(p.steps))
        throw std::invalid_argument("lif_layer_forward: need one input vector per time step");
    LifLayerResult out;
    out.spikes.resize(p.steps);
    out.potentials.resize(p.steps);
    Vec membrane(w.rows, 0.0);
    Vec drive;
    for (int t = 0; t < p.steps; ++t) {
        check_finite_input(inputs_per_step[t], "lif_layer_forward");
        affine(w, b, inputs_per_step[t], drive);
        Vec& pot = out.potentials[t];
        Vec& spk = out.spikes[t];
        pot.resize(w.rows);
        spk.resize(w.rows);
        for (int j = 0; j < w.rows; ++j) {
            const double h = (1.0 - p.leak) * membrane[j] + p.leak * drive[j];
            pot[j] = h;
            if (smoothed) {
                const double s = surrogate_value(h - p.threshold, p.surrogate_eta);
                spk[j] = s;
                membrane[j] = (1.0 - s) * h + s * p.reset;
            } else {
                const bool fire = h >= p.threshold;
                spk[j] = fire ? 1.0 : 0.0;
                membrane[j] = fire ? p.reset : h;
            }
        }
    }
    return out;
}

Vec snn_forward(const Network& net, const Vec& observation, SpikeTrace& trace, bool smoothed) {
    if (net.kind != NetKind::spiking) throw std::invalid_argument("snn_forward: network is not spiking");
    if (observation.size() != static_cast<std::size_t>(net.input_dim()))
        throw std::invalid_argument("snn_forward: observation dimension mismatch");
    check_finite_input(observation, "snn_forward");
    const LifParams& p = net.lif;
    p.validate();
    const std::size_t hidden_layers = net.layer_count() - 1;

    trace = SpikeTrace{};
    trace.input = observation;
    trace.smoothed = smoothed;
    trace.potentials.resize(hidden_layers);
    trace.spikes.resize(hidden_layers);
    trace.readout_potentials.assign(p.steps, Vec(net.output_dim(), 0.0));
    for (std::size_t l = 0; l < hidden_layers; ++l) {
        trace.potentials[l].assign(p.steps, Vec());
        trace.spikes[l].assign(p.steps, Vec());
    }

    std::vector<Vec> membranes(hidden_layers);
    for (std::size_t l = 0; l < hidden_layers; ++l) membranes[l].assign(net.weights[l].rows, 0.0);
    Vec readout_membrane(net.output_dim(), 0.0);
    Vec output(net.output_dim(), 0.0);
    Vec drive;

    for (int t = 0; t < p.steps; ++t) {
        const Vec* layer_input = &observation;  // direct encoding every step
        for (std::size_t l = 0; l < hidden_layers; ++l) {
            affine(net.weights[l], net.biases[l], *layer_input, drive);
            Vec& pot = trace.potentials[l][t];
            Vec& spk = trace.spikes[l][t];
            pot.resize(drive.size());
            spk.resize(drive.size());
            Vec& membrane = membranes[l];
            for (std::size_t j = 0; j < drive.size(); ++j) {
                const double h = (1.0 - p.leak) * membrane[j] + p.leak * drive[j];
                pot[j] = h;
                if (smoothed) {
                    const double s = surrogate_value(h - p.threshold, p.surrogate_eta);
                    spk[j] = s;
                    membrane[j] = (1.0 - s) * h + s * p.reset;
                } else {
                    const bool fire = h >= p.threshold;
                    spk[j] = fire ? 1.0 : 0.0;
                    membrane[j] = fire ? p.reset : h;
                }
            }
            layer_input = &spk;
        }
        // Readout integrates without a threshold.
        affine(net.weights.back(), net.biases.back(), *layer_input, drive);
        for (std::size_t j = 0; j < drive.size(); ++j)
            readout_membrane[j] = (1.0 - p.leak) * readout_membrane[j] + p.leak * drive[j];
        trace.readout_potentials[t] = readout_membrane;
        for (std::size_t j = 0; j < drive.size(); ++j) output[j] += readout_membrane[j];
    }
    for (auto& x : output) x /= static_cast<double>(p.steps);
    return output;
}

GradientSet snn_backward(const Network& net, const SpikeTrace& trace, const Vec& output_grad) {
    if (net.kind != NetKind::spiking) throw std::invalid_argument("snn_backward: network is not spiking");
    if (output_grad.size() != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("snn_backward: output gradient dimension mismatch");
    const LifParams& p = net.lif;
    const std::size_t hidden_layers = net.layer_count() - 1;
    if (trace.spikes.size() != hidden_layers ||
        trace.readout_potentials.size() != static_cast<std::size_t>(p.steps))
        throw std::invalid_argument("snn_backward: trace does not match network");

    GradientSet grads = GradientSet::zeros_like(net);
    const double inv_steps = 1.0 / static_cast<double>(p.steps);

    // Carried dJ/d(membrane state) per layer, flowing from step t+1 into t.
    std::vector<Vec> carry(hidden_layers);
    for (std::size_t l = 0; l < hidden_layers; ++l) carry[l].assign(net.weights[l].rows, 0.0);
    Vec carry_readout(net.output_dim(), 0.0);

    Vec d_drive;
    Vec spike_grad;
    for (int t = p.steps - 1; t >= 0; --t) {
        // Readout: state is used by the averaged output at every step.
        Vec d_state(net.output_dim());
        for (int j = 0; j < net.output_dim(); ++j)
            d_state[j] = carry_readout[j] + output_grad[j] * inv_steps;
        d_drive.assign(net.output_dim(), 0.0);
        for (int j = 0; j < net.output_dim(); ++j) d_drive[j] = p.leak * d_state[j];
        const Vec& readout_input = trace.spikes[hidden_layers - 1][t];
        accumulate_affine_grads(grads.weights[hidden_layers], grads.biases[hidden_layers], d_drive,
                                readout_input);
        spike_grad.assign(readout_input.size(), 0.0);
        affine_transpose_accum(net.weights[hidden_layers], d_drive, spike_grad);
        for (int j = 0; j < net.output_dim(); ++j) carry_readout[j] = (1.0 - p.leak) * d_state[j];

        for (std::size_t li = hidden_layers; li-- > 0;) {
            const Vec& pot = trace.potentials[li][t];
            const Vec& spk = trace.spikes[li][t];
            Vec d_pot(pot.size());
            for (std::size_t j = 0; j < pot.size(); ++j) {
                const double sd = surrogate_derivative(pot[j] - p.threshold, p.surrogate_eta);
                double g = spike_grad[j] * sd + carry[li][j] * (1.0 - spk[j]);
                if (trace.smoothed) g += carry[li][j] * (p.reset - pot[j]) * sd;
                d_pot[j] = g;
            }
            d_drive.assign(pot.size(), 0.0);
            for (std::size_t j = 0; j < pot.size(); ++j) d_drive[j] = p.leak * d_pot[j];
            const Vec& layer_input = (li == 0) ? trace.input : trace.spikes[li - 1][t];
            accumulate_affine_grads(grads.weights[li], grads.biases[li], d_drive, layer_input);
            if (li > 0) {
                spike_grad.assign(layer_input.size(), 0.0);
                affine_transpose_accum(net.weights[li], d_drive, spike_grad);
            }
            for (std::size_t j = 0; j < pot.size(); ++j) carry[li][j] = (1.0 - p.leak) * d_pot[j];
        }
    }
    return grads;
}

Vec dense_forward(const Network& net, const Vec& observation, DenseTrace& trace) {
    if (net.kind != NetKind::dense) throw std::invalid_argument("dense_forward: network is not dense");
    if (observation.size() != static_cast<std::size_t>(net.input_dim()))
        throw std::invalid_argument("dense_forward: observation dimension mismatch");
    check_finite_input(observation, "dense_forward");
    trace = DenseTrace{};
    trace.input = observation;
    Vec current = observation;
    Vec next;
    for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
        affine(net.weights[l], net.biases[l], current, next);
        for (auto& x : next) x = std::tanh(x);
        trace.hidden.push_back(next);
        current = next;
    }
    affine(net.weights.back(), net.biases.back(), current, next);
    return next;
}

GradientSet dense_backward(const Network& net, const DenseTrace& trace, const Vec& output_grad) {
    if (net.kind != NetKind::dense) throw std::invalid_argument("dense_backward: network is not dense");
    if (trace.hidden.size() + 1 != net.layer_count())
        throw std::invalid_argument("dense_backward: trace does not match network");
    GradientSet grads = GradientSet::zeros_like(net);
    Vec delta = output_grad;
    for (std::size_t li = net.layer_count(); li-- > 0;) {
        const Vec& layer_input = (li == 0) ? trace.input : trace.hidden[li - 1];
        accumulate_affine_grads(grads.weights[li], grads.biases[li], delta, layer_input);
        if (li == 0) break;
        Vec prev(layer_input.size(), 0.0);
        affine_transpose_accum(net.weights[li], delta, prev);
        // Through the tanh of the producing layer.
        for (std::size_t j = 0; j < prev.size(); ++j)
            prev[j] *= 1.0 - layer_input[j] * layer_input[j];
        delta = std::move(prev);
    }
    return grads;
}

Vec net_forward(const Network& net, const Vec& observation, SpikeTrace& strace, DenseTrace& dtrace) {
    if (net.kind == NetKind::spiking) return snn_forward(net, observation, strace);
    return dense_forward(net, observation, dtrace);
}

GradientSet net_backward(const Network& net, const SpikeTrace& strace, const DenseTrace& dtrace,
                         const Vec& output_grad) {
    if (net.kind == NetKind::spiking) return snn_backward(net, strace, output_grad);
    return dense_backward(net, dtrace, output_grad);
}

ParamRefs ParamRefs::of(Network& net, Vec* extra) {
    ParamRefs refs;
    for (auto& w : net.weights) refs.blocks.emplace_back(w.a);
    for (auto& b : net.biases) refs.blocks.emplace_back(b);
    if (extra) refs.blocks.emplace_back(*extra);
    return refs;
}

std::size_t ParamRefs::total_size() const {
    std::size_t n = 0;
    for (const auto& blk : blocks) n += blk.size();
    return n;
}

GradRefs GradRefs::of(const GradientSet& g, const Vec* extra) {
    GradRefs refs;
    for (const auto& w : g.weights) refs.blocks.emplace_back(w.a);
    for (const auto& b : g.biases) refs.blocks.emplace_back(b);
    if (extra) refs.blocks.emplace_back(*extra);
    return refs;
}

bool Optimizer::apply_update(ParamRefs params, const GradRefs& grads) {
    if (params.blocks.size() != grads.blocks.size())
        throw std::invalid_argument("apply_update: parameter/gradient block mismatch");

    double norm_sq = 0.0;
    bool finite = true;
    for (std::size_t b = 0; b < grads.blocks.size(); ++b) {
        if (params.blocks[b].size() != grads.blocks[b].size())
            throw std::invalid_argument("apply_update: block shape mismatch");
        for (double g : grads.blocks[b]) {
            if (!std::isfinite(g)) finite = false;
            norm_sq += g * g;
        }
    }
    if (!finite) {
        ++skipped;
        return false;
    }

    double scale = 1.0;
    if (grad_clip > 0.0 && norm_sq > grad_clip * grad_clip)
        scale = grad_clip / std::sqrt(norm_sq);

    if (rule == UpdateRule::sgd) {
        for (std::size_t b = 0; b < params.blocks.size(); ++b)
            for (std::size_t i = 0; i < params.blocks[b].size(); ++i)
                params.blocks[b][i] -= lr * scale * grads.blocks[b][i];
        ++step_count;
        return true;
    }

    if (m.size() != params.blocks.size()) {
        m.clear();
        v.clear();
        for (const auto& blk : params.blocks) {
            m.emplace_back(blk.size(), 0.0);
            v.emplace_back(blk.size(), 0.0);
        }
    }
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t b = 0; b < params.blocks.size(); ++b) {
        for (std::size_t i = 0; i < params.blocks[b].size(); ++i) {
            const double g = scale * grads.blocks[b][i];
            m[b][i] = beta1 * m[b][i] + (1.0 - beta1) * g;
            v[b][i] = beta2 * v[b][i] + (1.0 - beta2) * g * g;
            const double m_hat = m[b][i] / bc1;
            const double v_hat = v[b][i] / bc2;
            params.blocks[b][i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
    return true;
}

}  // namespace isacspike
