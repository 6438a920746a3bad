#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sfq/devices.hpp"
#include "sfq/netlist.hpp"
#include "sfq/ratemodel.hpp"

namespace sfq {

// Rate-coded MLP surrogate. Layer 0 is a fixed identity "normalizer" stage
// (paper-style input neurons); subsequent layers carry trainable weights in
// [-1, 1] (pass probabilities) and signed biases in normalized rate units.
struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd biases;   // normalized to r_norm
    bool trainable = true;
    ActivationModel activation;
};

struct MLPSpec {
    std::vector<Layer> layers;
    MergerParams merger{2.0};
    double r_norm_ghz = 33.3;

    std::size_t input_size() const;
    std::size_t output_size() const;
};

struct TrainConfig {
    double learning_rate = 0.5;
    int max_epochs = 5000;
    double target_loss = 1e-4;
    std::uint64_t seed = 1;
    double weight_clip = 1.0;
    double bias_clip = 2.0;
};

struct Dataset {
    // Normalized rates (units of r_norm), values in [0, 2].
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> targets;
};

struct TrainResult {
    MLPSpec mlp;
    std::vector<double> loss_curve;
    double final_loss = 0.0;
    int epochs = 0;
};

// Steady-state rate propagation through the surrogate. Positive and negative
// partial sums saturate through the merger model separately, exactly as the
// lowered network merges excitatory and inhibitory pulse streams. Input and
// output in GHz.
Eigen::VectorXd forward(const MLPSpec& mlp, const Eigen::VectorXd& input_ghz);

struct LayerGradient {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
};

// Full-batch MSE gradient over normalized outputs; analytic backprop.
std::vector<LayerGradient> gradients(const MLPSpec& mlp, const Dataset& data, double* loss_out);

// Plain gradient descent with per-step clipping of weights and biases.
TrainResult train(const MLPSpec& mlp, const Dataset& data, const TrainConfig& cfg);

// Emits the SFQ network: one synapse per nonzero weight routed to exc (w >= 0)
// or inh (w < 0), bias sources at |b| * r_norm, a merger per driven neuron
// input port, golden-ratio source phases, fan-out expanded to splitter trees.
NetworkSpec lower_to_network(const MLPSpec& mlp, const SynapseParams& dev, const NeuronParams& np,
                             const MergerParams& mp, const SplitterParams& sp);

// 2-2-1 XOR architecture behind identity normalizers, with symmetry-breaking
// difference-detector initialization and the 4-pattern dataset.
std::pair<MLPSpec, Dataset> build_xor(std::uint64_t seed = 1, double low_norm = 0.1,
                                      double high_norm = 1.8);

// Text format: `layer k: w[i][j]=<v>` and `layer k: bias[i]=<v>` lines.
std::string mlp_to_text(const MLPSpec& mlp);
MLPSpec mlp_from_text(const std::string& text);

// Fractional part of k * golden ratio; used to stagger source phases so
// coincident pulse trains never collapse in mergers.
double golden_phase_fraction(std::size_t k);

}  // namespace sfq
