// SPDX-License-Identifier: Apache-2.0
//
// From-scratch leaky integrate-and-fire layers with manual backpropagation
// through time, arctan surrogate gradients, a dense tanh baseline, and the
// optimizers that drive both.

#ifndef ISACSPIKE_SNN_HPP_
#define ISACSPIKE_SNN_HPP_

#include <cstdint>
#include <span>

#include "isacspike/common.hpp"
#include "isacspike/rng.hpp"

namespace isacspike {

// Minimal row-major matrix; heavy lifting is hand-written matvec loops.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// y = W x + b
void affine(const Mat& w, const Vec& b, const Vec& x, Vec& y);
// x_grad += W^T y_grad
void affine_transpose_accum(const Mat& w, const Vec& y_grad, Vec& x_grad);

struct LifParams {
    double leak = 0.5;          // lambda in (0, 1]
    double threshold = 1.0;     // fire when the integrated potential reaches this
    double reset = 0.0;         // potential after a spike; must be < threshold
    int steps = 6;              // unrolled time depth
    double surrogate_eta = 3.0;

    void validate() const;
};

enum class NetKind { spiking, dense };

// Feed-forward network of three weight layers. Spiking: two LIF hidden layers
// and a non-thresholded leaky readout averaged over time. Dense: two tanh
// hidden layers and an identity output.
struct Network {
    NetKind kind = NetKind::spiking;
    std::vector<Mat> weights;  // weights[l] maps layer input -> layer output
    std::vector<Vec> biases;
    LifParams lif;

    int input_dim() const { return weights.front().cols; }
    int output_dim() const { return weights.back().rows; }
    std::size_t layer_count() const { return weights.size(); }
    std::vector<std::pair<int, int>> layer_dims() const;
};

// Scaled Gaussian init, std = gain / sqrt(fan_in) per layer; biases zero.
Network make_network(NetKind kind, const std::vector<int>& dims, Rng& rng,
                     double hidden_gain = 1.0, double output_gain = 1.0);

// Everything the backward pass and the energy ledger need from one forward.
struct SpikeTrace {
    Vec input;                                   // direct encoding, re-presented each step
    std::vector<std::vector<Vec>> potentials;    // [layer][step] pre-reset potentials
    std::vector<std::vector<Vec>> spikes;        // [layer][step] 0/1 (continuous if smoothed)
    std::vector<Vec> readout_potentials;         // [step]
    bool smoothed = false;

    // Mean spike count per neuron-step for each hidden layer.
    Vec firing_rates() const;
};

struct DenseTrace {
    Vec input;
    std::vector<Vec> hidden;  // post-tanh activations per hidden layer
};

struct GradientSet {
    std::vector<Mat> weights;
    std::vector<Vec> biases;

    static GradientSet zeros_like(const Network& net);
    void accumulate(const GradientSet& other, double scale = 1.0);
    void scale(double s);
    double squared_norm() const;
    bool all_finite() const;
};

// Arctan spike surrogate and its analytic derivative.
double surrogate_value(double x, double eta);
double surrogate_derivative(double x, double eta);

// One LIF layer driven by a per-step input sequence. Integrate, compare to
// the threshold, then reset on fire or carry the potential. In smoothed mode
// (test-only) the spike and the reset gate both use the surrogate, making the
// map fully differentiable.
struct LifLayerResult {
    std::vector<Vec> spikes;
    std::vector<Vec> potentials;  // pre-reset
};
LifLayerResult lif_layer_forward(const Mat& w, const Vec& b, std::span<const Vec> inputs_per_step,
                                 const LifParams& p, bool smoothed = false);

// Full spiking forward: returns the time-averaged readout potential.
Vec snn_forward(const Network& net, const Vec& observation, SpikeTrace& trace,
                bool smoothed = false);

// BPTT over the recorded trace. The reset assignment is gradient-detached in
// hard mode; smoothed traces get the exact adjoint of the smoothed forward.
GradientSet snn_backward(const Network& net, const SpikeTrace& trace, const Vec& output_grad);

Vec dense_forward(const Network& net, const Vec& observation, DenseTrace& trace);
GradientSet dense_backward(const Network& net, const DenseTrace& trace, const Vec& output_grad);

// Dispatch helpers used by the trainer; spiking nets also fill the trace.
Vec net_forward(const Network& net, const Vec& observation, SpikeTrace& strace, DenseTrace& dtrace);
GradientSet net_backward(const Network& net, const SpikeTrace& strace, const DenseTrace& dtrace,
                         const Vec& output_grad);

// -- parameter updates ----------------------------------------------------

// Flat views over a parameter pack (network weights/biases plus optional
// extra vectors such as the policy log-std).
struct ParamRefs {
    std::vector<std::span<double>> blocks;

    static ParamRefs of(Network& net, Vec* extra = nullptr);
    std::size_t total_size() const;
};

struct GradRefs {
    std::vector<std::span<const double>> blocks;

    static GradRefs of(const GradientSet& g, const Vec* extra = nullptr);
};

enum class UpdateRule { sgd, adam };

// Descent-direction optimizer: callers maximizing an objective pass the
// negated gradient.
struct Optimizer {
    UpdateRule rule = UpdateRule::adam;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double grad_clip = 0.5;  // global norm; <= 0 disables
    std::uint64_t step_count = 0;
    std::uint64_t skipped = 0;  // non-finite gradients
    std::vector<Vec> m;
    std::vector<Vec> v;

    // Returns false when the update was skipped because of non-finite grads.
    bool apply_update(ParamRefs params, const GradRefs& grads);
};

}  // namespace isacspike

#endif  // ISACSPIKE_SNN_HPP_
