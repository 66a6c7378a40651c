#pragma once

#include <vector>

#include "dwmtj/device.hpp"

namespace dwmtj {

// Winner selection: Hard picks exactly the argmax of integrated current;
// Soft takes every neuron whose firing latch is set.
enum class WtaMode { Hard, Soft };

// Which columns a feedback pass writes: only the caller's targets, or every
// column with the write current scaled by its own neuron conductance.
enum class FeedbackScope { WinnersOnly, AllScaled };

// One encoded datapoint: a Gnd/V_dd level per input row.
struct InputPattern {
    std::vector<VoltageLevel> voltages;

    std::size_t size() const { return voltages.size(); }
};

// Synapse crossbar with one output neuron per column. Synapse states are
// stored row-major by input, so a feed-forward pass walks each active input
// row contiguously across columns.
struct CrossbarLayer {
    int n_inputs = 0;
    int n_neurons = 0;
    DeviceParams params;
    std::vector<SynapseState> synapses; // [input * n_neurons + neuron]
    std::vector<NeuronState> neurons;

    static CrossbarLayer create(int n_inputs, int n_neurons, const DeviceParams& params);

    SynapseState& synapse(int input, int neuron) {
        return synapses[static_cast<std::size_t>(input) * n_neurons + neuron];
    }
    const SynapseState& synapse(int input, int neuron) const {
        return synapses[static_cast<std::size_t>(input) * n_neurons + neuron];
    }
};

// Outcome of one presentation window.
struct PresentationResult {
    std::vector<double> integrated_currents; // time-summed feed-forward current per neuron
    std::vector<bool> fired;                 // latched firing flags
    std::vector<int> winner_set;             // nonempty; singleton in hard mode
};

// Index of the largest integrated current, lowest index on ties.
int argmax_current(const std::vector<double>& currents);

// Per-column feed-forward currents for one input pattern: sum over active
// rows of synapse conductance times V_dd, with the neuron input treated as an
// ideal ground-referenced sink.
std::vector<double> feedforward_currents(const CrossbarLayer& layer, const InputPattern& input);

// Run one presentation window: integrate every neuron over
// steps_per_presentation steps under the (static) feed-forward currents and
// select the winner set. Neuron states are left post-integration; the caller
// resets between presentations.
PresentationResult present(CrossbarLayer& layer, const InputPattern& input, WtaMode mode);

// Feedback write current through one synapse: the neuron's binary conductance
// times the V_dd/2 bias against the input rail. Gnd input -> positive current
// -> conductance decreases; V_dd input -> negative -> increases.
double feedback_current(NeuronState neuron, VoltageLevel v_in, const DeviceParams& p);

// One feedback window: step every synapse of the in-scope columns for
// steps_per_presentation steps under its feedback current.
void apply_feedback(CrossbarLayer& layer, const InputPattern& input,
                    const std::vector<int>& targets, FeedbackScope scope);

// Reset all neurons; synapses untouched.
void reset_layer(CrossbarLayer& layer);

} // namespace dwmtj
