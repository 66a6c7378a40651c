#include "dwmtj/crossbar.hpp"

#include <string>

#include "dwmtj/error.hpp"

namespace dwmtj {

namespace {

void check_shape(const CrossbarLayer& layer, const InputPattern& input) {
    if (static_cast<int>(input.size()) != layer.n_inputs) {
        throw ConfigError("input pattern width " + std::to_string(input.size()) +
                          " does not match layer n_inputs " + std::to_string(layer.n_inputs));
    }
}

} // namespace

CrossbarLayer CrossbarLayer::create(int n_inputs, int n_neurons, const DeviceParams& params) {
    if (n_inputs < 1 || n_neurons < 1) {
        throw ConfigError("CrossbarLayer requires at least one input and one neuron");
    }
    params.validate();
    CrossbarLayer layer;
    layer.n_inputs = n_inputs;
    layer.n_neurons = n_neurons;
    layer.params = params;
    layer.synapses.assign(static_cast<std::size_t>(n_inputs) * n_neurons,
                          SynapseState{params.track_width_synapse / 2});
    layer.neurons.assign(n_neurons, NeuronState{params.track_width_neuron, false});
    return layer;
}

int argmax_current(const std::vector<double>& currents) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(currents.size()); ++k) {
        if (currents[k] > currents[best]) best = k;
    }
    return best;
}

std::vector<double> feedforward_currents(const CrossbarLayer& layer, const InputPattern& input) {
    check_shape(layer, input);
    const auto& p = layer.params;
    std::vector<double> currents(layer.n_neurons, 0.0);
    for (int j = 0; j < layer.n_inputs; ++j) {
        if (input.voltages[j] != VoltageLevel::Vdd) continue;
        const SynapseState* row = &layer.synapses[static_cast<std::size_t>(j) * layer.n_neurons];
        for (int k = 0; k < layer.n_neurons; ++k) {
            currents[k] += synapse_conductance(row[k], p) * p.v_dd;
        }
    }
    return currents;
}

PresentationResult present(CrossbarLayer& layer, const InputPattern& input, WtaMode mode) {
    check_shape(layer, input);
    const auto& p = layer.params;

    // Synapse conductances are frozen during inference, so the feed-forward
    // currents are the same at every step of the window.
    const std::vector<double> currents = feedforward_currents(layer, input);

    PresentationResult result;
    result.integrated_currents.assign(layer.n_neurons, 0.0);
    for (int step = 0; step < p.steps_per_presentation; ++step) {
        for (int k = 0; k < layer.n_neurons; ++k) {
            layer.neurons[k] = step_neuron(layer.neurons[k], currents[k], p);
            result.integrated_currents[k] += currents[k];
        }
    }
    result.fired.resize(layer.n_neurons);
    for (int k = 0; k < layer.n_neurons; ++k) result.fired[k] = layer.neurons[k].fired;

    if (mode == WtaMode::Hard) {
        result.winner_set.push_back(argmax_current(result.integrated_currents));
    } else {
        for (int k = 0; k < layer.n_neurons; ++k) {
            if (result.fired[k]) result.winner_set.push_back(k);
        }
        if (result.winner_set.empty()) {
            result.winner_set.push_back(argmax_current(result.integrated_currents));
        }
    }
    return result;
}

double feedback_current(NeuronState neuron, VoltageLevel v_in, const DeviceParams& p) {
    return neuron_conductance(neuron, p) * (p.v_dd / 2 - voltage(v_in, p));
}

void apply_feedback(CrossbarLayer& layer, const InputPattern& input,
                    const std::vector<int>& targets, FeedbackScope scope) {
    check_shape(layer, input);
    const auto& p = layer.params;

    std::vector<int> columns;
    if (scope == FeedbackScope::AllScaled) {
        columns.resize(layer.n_neurons);
        for (int k = 0; k < layer.n_neurons; ++k) columns[k] = k;
    } else {
        columns = targets;
        if (columns.empty()) return; // nothing selected: no-op
    }

    for (int k : columns) {
        if (k < 0 || k >= layer.n_neurons) {
            throw ConfigError("apply_feedback: target column " + std::to_string(k) + " out of range");
        }
        for (int j = 0; j < layer.n_inputs; ++j) {
            const double i_fb = feedback_current(layer.neurons[k], input.voltages[j], p);
            SynapseState s = layer.synapse(j, k);
            for (int step = 0; step < p.steps_per_presentation; ++step) {
                s = step_synapse(s, i_fb, p);
            }
            layer.synapse(j, k) = s;
        }
    }
}

void reset_layer(CrossbarLayer& layer) {
    for (auto& n : layer.neurons) n = reset_neuron(n, layer.params);
}

} // namespace dwmtj
