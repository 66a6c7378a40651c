#include "dwmtj/clustering.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "dwmtj/error.hpp"

namespace dwmtj {

void ClusterConfig::validate() const {
    if (n_clusters < 2) throw ConfigError("ClusterConfig: n_clusters must be >= 2");
    if (unsupervised_samples < 0) throw ConfigError("ClusterConfig: unsupervised_samples must be >= 0");
}

void TrainingLog::write_csv(std::ostream& out) const {
    out << "sample_index,winner,mean_abs_dweight,fired_count\n";
    char buf[64];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%.9g", e.mean_abs_dweight);
        out << e.sample_index << ',' << e.winner << ',' << buf << ',' << e.fired_count << '\n';
    }
}

CrossbarLayer init_network(int n_inputs, const ClusterConfig& cfg, const DeviceParams& params) {
    cfg.validate();
    CrossbarLayer layer = CrossbarLayer::create(n_inputs, cfg.n_clusters, params);
    if (cfg.init == InitScheme::UniformRandom) {
        Rng rng(derive_seed(cfg.seed, 0x11));
        for (auto& s : layer.synapses) {
            s.position = rng.uniform(0.0, params.track_width_synapse);
        }
    }
    // Midpoint positions are what CrossbarLayer::create already produced.
    return layer;
}

UnsupervisedTrainer::UnsupervisedTrainer(CrossbarLayer& layer, const Dataset& data,
                                         const ClusterConfig& cfg)
    : layer_(layer), data_(data), cfg_(cfg) {
    cfg.validate();
    if (data.meta.n_inputs != layer.n_inputs) {
        throw ConfigError("dataset width " + std::to_string(data.meta.n_inputs) +
                          " does not match layer n_inputs " + std::to_string(layer.n_inputs));
    }
    if (data.size() == 0 && cfg.unsupervised_samples > 0) {
        throw ConfigError("cannot train on an empty dataset");
    }
    Rng order_rng(derive_seed(cfg.seed, 0x22));
    order_ = epoch_shuffled_indices(data.size(), cfg.unsupervised_samples, order_rng);
    log_.entries.reserve(order_.size());
}

void UnsupervisedTrainer::advance_to(long upto) {
    if (upto > total()) {
        throw ConfigError("advance_to(" + std::to_string(upto) + ") exceeds unsupervised_samples " +
                          std::to_string(total()));
    }
    const double weight_span = layer_.params.track_width_synapse;
    const double total_synapses = static_cast<double>(layer_.n_inputs) * layer_.n_neurons;
    for (; presented_ < upto; ++presented_) {
        const InputPattern& input = data_.patterns[order_[presented_]];
        reset_layer(layer_);
        const PresentationResult res = present(layer_, input, cfg_.wta_mode);

        // Snapshot the columns the feedback pass can touch, for the log.
        const bool all = cfg_.feedback_scope == FeedbackScope::AllScaled;
        const std::size_t snap_cols = all ? layer_.n_neurons : res.winner_set.size();
        scratch_.resize(snap_cols * layer_.n_inputs);
        for (std::size_t c = 0; c < snap_cols; ++c) {
            const int k = all ? static_cast<int>(c) : res.winner_set[c];
            for (int j = 0; j < layer_.n_inputs; ++j) {
                scratch_[c * layer_.n_inputs + j] = layer_.synapse(j, k).position;
            }
        }

        apply_feedback(layer_, input, res.winner_set, cfg_.feedback_scope);

        double abs_dpos = 0.0;
        for (std::size_t c = 0; c < snap_cols; ++c) {
            const int k = all ? static_cast<int>(c) : res.winner_set[c];
            for (int j = 0; j < layer_.n_inputs; ++j) {
                abs_dpos += std::abs(layer_.synapse(j, k).position - scratch_[c * layer_.n_inputs + j]);
            }
        }

        TrainingLogEntry entry;
        entry.sample_index = presented_;
        entry.winner = argmax_current(res.integrated_currents);
        entry.mean_abs_dweight = abs_dpos / weight_span / total_synapses;
        entry.fired_count = 0;
        for (bool f : res.fired) entry.fired_count += f ? 1 : 0;
        log_.entries.push_back(entry);
    }
}

TrainingLog train_unsupervised(CrossbarLayer& layer, const Dataset& data, const ClusterConfig& cfg) {
    UnsupervisedTrainer trainer(layer, data, cfg);
    trainer.advance_to(cfg.unsupervised_samples);
    return trainer.take_log();
}

int infer_cluster(CrossbarLayer& layer, const InputPattern& input) {
    reset_layer(layer);
    const PresentationResult res = present(layer, input, WtaMode::Hard);
    reset_layer(layer);
    return res.winner_set.front();
}

std::vector<double> receptive_field(const CrossbarLayer& layer, int neuron, int height, int width) {
    if (neuron < 0 || neuron >= layer.n_neurons) {
        throw ConfigError("receptive_field: neuron " + std::to_string(neuron) + " out of range");
    }
    if (height * width != layer.n_inputs) {
        throw ConfigError("receptive_field: shape " + std::to_string(height) + "x" +
                          std::to_string(width) + " does not cover " +
                          std::to_string(layer.n_inputs) + " inputs");
    }
    std::vector<double> image(static_cast<std::size_t>(height) * width);
    for (int j = 0; j < layer.n_inputs; ++j) {
        image[j] = synapse_weight(synapse_conductance(layer.synapse(j, neuron), layer.params),
                                  layer.params);
    }
    return image;
}

} // namespace dwmtj
