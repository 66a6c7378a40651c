#pragma once

#include <vector>

#include "dwmtj/crossbar.hpp"
#include "dwmtj/data.hpp"

namespace dwmtj {

// Supervised read-out: a plain real-valued weight matrix trained with the
// delta rule. The decoder is abstract arithmetic, not a DW device; only the
// encoder carries device physics.
struct DecoderLayer {
    int n_clusters = 0;
    int n_labels = 0;
    std::vector<double> weights; // row-major [cluster * n_labels + label]
    double learning_rate = 0.05;

    static DecoderLayer create(int n_clusters, int n_labels, double learning_rate);

    double& weight(int cluster, int label) {
        return weights[static_cast<std::size_t>(cluster) * n_labels + label];
    }
    double weight(int cluster, int label) const {
        return weights[static_cast<std::size_t>(cluster) * n_labels + label];
    }
};

// Binary activations read from the encoder: one-hot winner in hard mode, the
// fired-set indicator in soft mode (hard fallback when nothing fires).
struct SpikeFeature {
    std::vector<double> activations;
};

// Presents on the current neuron state; reset_layer first for a fresh read.
SpikeFeature encode_spikes(CrossbarLayer& layer, const InputPattern& input, WtaMode mode);

// Delta rule over the feature sequence: o = f'W, W += eta * f (onehot(y) - o),
// repeated for `epochs` passes in sequence order.
void train_decoder(DecoderLayer& dec, const std::vector<SpikeFeature>& features,
                   const std::vector<int>& labels, int epochs);

// argmax of f'W, lowest index on ties.
int classify(const DecoderLayer& dec, const SpikeFeature& feature);

// Fraction of the labeled test set classified correctly.
double evaluate(CrossbarLayer& encoder, const DecoderLayer& dec, const Dataset& test, WtaMode mode);

} // namespace dwmtj
