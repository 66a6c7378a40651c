#include "dwmtj/decoder.hpp"

#include <string>

#include "dwmtj/error.hpp"

namespace dwmtj {

DecoderLayer DecoderLayer::create(int n_clusters, int n_labels, double learning_rate) {
    if (n_clusters < 1 || n_labels < 1) {
        throw ConfigError("DecoderLayer requires at least one cluster and one label");
    }
    // learning_rate 0 is the identity rule; useful in tests, rejected for
    // real runs by ExperimentConfig::validate.
    if (!(learning_rate >= 0)) {
        throw ConfigError("DecoderLayer learning_rate must be non-negative");
    }
    DecoderLayer dec;
    dec.n_clusters = n_clusters;
    dec.n_labels = n_labels;
    dec.learning_rate = learning_rate;
    dec.weights.assign(static_cast<std::size_t>(n_clusters) * n_labels, 0.0);
    return dec;
}

SpikeFeature encode_spikes(CrossbarLayer& layer, const InputPattern& input, WtaMode mode) {
    const PresentationResult res = present(layer, input, mode);
    SpikeFeature feature;
    feature.activations.assign(layer.n_neurons, 0.0);
    if (mode == WtaMode::Hard) {
        feature.activations[res.winner_set.front()] = 1.0;
    } else {
        for (int k : res.winner_set) feature.activations[k] = 1.0;
    }
    return feature;
}

void train_decoder(DecoderLayer& dec, const std::vector<SpikeFeature>& features,
                   const std::vector<int>& labels, int epochs) {
    if (features.size() != labels.size()) {
        throw ConfigError("train_decoder: " + std::to_string(features.size()) + " features vs " +
                          std::to_string(labels.size()) + " labels");
    }
    std::vector<double> output(dec.n_labels);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            const int y = labels[i];
            if (y < 0 || y >= dec.n_labels) {
                throw DataError("train_decoder: label " + std::to_string(y) + " out of range [0, " +
                                std::to_string(dec.n_labels) + ")");
            }
            const auto& f = features[i].activations;
            if (static_cast<int>(f.size()) != dec.n_clusters) {
                throw ConfigError("train_decoder: feature width " + std::to_string(f.size()) +
                                  " does not match decoder n_clusters");
            }
            for (int c = 0; c < dec.n_labels; ++c) output[c] = 0.0;
            for (int k = 0; k < dec.n_clusters; ++k) {
                if (f[k] == 0.0) continue;
                for (int c = 0; c < dec.n_labels; ++c) output[c] += f[k] * dec.weight(k, c);
            }
            for (int k = 0; k < dec.n_clusters; ++k) {
                if (f[k] == 0.0) continue;
                const double scale = dec.learning_rate * f[k];
                for (int c = 0; c < dec.n_labels; ++c) {
                    const double target = c == y ? 1.0 : 0.0;
                    dec.weight(k, c) += scale * (target - output[c]);
                }
            }
        }
    }
}

int classify(const DecoderLayer& dec, const SpikeFeature& feature) {
    const auto& f = feature.activations;
    if (static_cast<int>(f.size()) != dec.n_clusters) {
        throw ConfigError("classify: feature width " + std::to_string(f.size()) +
                          " does not match decoder n_clusters");
    }
    std::vector<double> output(dec.n_labels, 0.0);
    for (int k = 0; k < dec.n_clusters; ++k) {
        if (f[k] == 0.0) continue;
        for (int c = 0; c < dec.n_labels; ++c) output[c] += f[k] * dec.weight(k, c);
    }
    int best = 0;
    for (int c = 1; c < dec.n_labels; ++c) {
        if (output[c] > output[best]) best = c;
    }
    return best;
}

double evaluate(CrossbarLayer& encoder, const DecoderLayer& dec, const Dataset& test, WtaMode mode) {
    if (!test.labeled() || test.size() == 0) {
        throw DataError("evaluate: needs a non-empty labeled test set");
    }
    long correct = 0;
    for (int i = 0; i < test.size(); ++i) {
        reset_layer(encoder);
        const SpikeFeature f = encode_spikes(encoder, test.patterns[i], mode);
        if (classify(dec, f) == test.labels[i]) ++correct;
    }
    reset_layer(encoder);
    return static_cast<double>(correct) / test.size();
}

} // namespace dwmtj
