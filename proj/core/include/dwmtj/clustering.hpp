#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dwmtj/crossbar.hpp"
#include "dwmtj/data.hpp"

namespace dwmtj {

// Initial domain-wall placement. Midpoint makes every column identical, which
// ties all hard-WTA competitions to index 0; it exists for experiments, not
// as a useful default.
enum class InitScheme { UniformRandom, Midpoint };

struct ClusterConfig {
    int n_clusters = 2;          // N_HL
    WtaMode wta_mode = WtaMode::Hard;
    FeedbackScope feedback_scope = FeedbackScope::WinnersOnly;
    long unsupervised_samples = 0; // U
    std::uint64_t seed = 1;        // drives initialization and data order
    InitScheme init = InitScheme::UniformRandom;

    void validate() const;
};

struct TrainingLogEntry {
    long sample_index = 0;
    int winner = 0;            // argmax of integrated current
    double mean_abs_dweight = 0.0; // |weight change| averaged over all synapses
    int fired_count = 0;
};

struct TrainingLog {
    std::vector<TrainingLogEntry> entries;

    // CSV rows: sample_index,winner,mean_abs_dweight,fired_count
    void write_csv(std::ostream& out) const;
};

// Fresh layer with seeded initial DW positions.
CrossbarLayer init_network(int n_inputs, const ClusterConfig& cfg, const DeviceParams& params);

// Stepwise trainer over the seeded sample stream, for callers that pause at
// checkpoints. train_unsupervised is the one-shot wrapper.
class UnsupervisedTrainer {
public:
    UnsupervisedTrainer(CrossbarLayer& layer, const Dataset& data, const ClusterConfig& cfg);

    long presented() const { return presented_; }
    long total() const { return static_cast<long>(order_.size()); }

    // Present-and-update samples until `presented() == upto`.
    void advance_to(long upto);

    const TrainingLog& log() const { return log_; }
    TrainingLog take_log() { return std::move(log_); }

private:
    CrossbarLayer& layer_;
    const Dataset& data_;
    ClusterConfig cfg_;
    std::vector<int> order_;
    long presented_ = 0;
    TrainingLog log_;
    std::vector<double> scratch_;
};

// Competitive feedback training: for each of U datapoints (seeded shuffled
// order, reshuffled per epoch) run reset -> present -> feedback on the winner
// set.
TrainingLog train_unsupervised(CrossbarLayer& layer, const Dataset& data, const ClusterConfig& cfg);

// Hard winner for one pattern; neuron state is reset before and after.
int infer_cluster(CrossbarLayer& layer, const InputPattern& input);

// Column k's weights reshaped row-major to a height x width grayscale image.
std::vector<double> receptive_field(const CrossbarLayer& layer, int neuron, int height, int width);

} // namespace dwmtj
