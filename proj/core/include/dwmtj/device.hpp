#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "dwmtj/error.hpp"

namespace dwmtj {

// Physical constants shared by every synapse and neuron in a layer.
// Normalized units: track widths default to 1, V_dd to 1. The parallel MTJ
// state is the high-conductance state, so g_parallel > g_antiparallel.
struct DeviceParams {
    double g_parallel = 2.0;        // G_P
    double g_antiparallel = 1.0;    // G_AP
    double track_width_synapse = 1.0;
    double track_width_neuron = 1.0;
    double fire_threshold = 0.5;    // b_n, fraction of the neuron track
    double mobility_synapse = 0.1;  // DW velocity per unit write current
    double mobility_neuron = 0.1;
    double leak_rate = 0.05;        // restoring velocity, drives x_n back toward w_n
    double dt = 0.1;
    double v_dd = 1.0;
    int steps_per_presentation = 10;

    void validate() const {
        auto fail = [](const std::string& what) { throw ConfigError("DeviceParams: " + what); };
        if (!(g_parallel > g_antiparallel) || !(g_antiparallel > 0)) {
            fail("requires g_parallel > g_antiparallel > 0");
        }
        if (!(track_width_synapse > 0) || !(track_width_neuron > 0)) fail("track widths must be positive");
        if (!(fire_threshold > 0) || !(fire_threshold < track_width_neuron)) {
            fail("fire_threshold must lie strictly inside the neuron track");
        }
        if (!(dt > 0)) fail("dt must be positive");
        if (!(mobility_synapse > 0) || !(mobility_neuron > 0)) fail("mobilities must be positive");
        if (leak_rate < 0) fail("leak_rate must be non-negative");
        if (steps_per_presentation < 1) fail("steps_per_presentation must be >= 1");
        if (!(v_dd > 0)) fail("v_dd must be positive");
    }
};

// Domain-wall position along the synapse track. x = 0 is fully parallel
// (conductance G_P); x = w_s fully anti-parallel (G_AP).
struct SynapseState {
    double position = 0.5;
};

// Domain-wall position along the neuron track plus the firing latch for the
// current presentation. Integration drives the position toward 0; it fires
// once the position reaches fire_threshold.
struct NeuronState {
    double position = 1.0;
    bool fired = false;
};

// Binary input rail. Patterns are encoded strictly as Gnd/V_dd levels.
enum class VoltageLevel : std::uint8_t { Gnd = 0, Vdd = 1 };

inline double voltage(VoltageLevel v, const DeviceParams& p) {
    return v == VoltageLevel::Vdd ? p.v_dd : 0.0;
}

// Conductance of the synapse MTJ: linear mix of the parallel and
// anti-parallel segments, decreasing in the DW position.
inline double synapse_conductance(SynapseState s, const DeviceParams& p) {
    const double w = p.track_width_synapse;
    return (s.position / w) * p.g_antiparallel + ((w - s.position) / w) * p.g_parallel;
}

// Normalized weight in [0, 1]. Conductance outside [G_AP, G_P] cannot come
// from a valid synapse state and signals corruption.
inline double synapse_weight(double conductance, const DeviceParams& p) {
    const double span = p.g_parallel - p.g_antiparallel;
    const double tol = 1e-9 * span;
    if (conductance < p.g_antiparallel - tol || conductance > p.g_parallel + tol) {
        throw ContractError("synapse_weight: conductance " + std::to_string(conductance) +
                            " outside [G_AP, G_P]");
    }
    return std::clamp((conductance - p.g_antiparallel) / span, 0.0, 1.0);
}

// The short neuron tunnel barrier gives only the two extreme conductances.
// The exact-threshold tie resolves to the not-yet-fired level.
inline double neuron_conductance(NeuronState n, const DeviceParams& p) {
    return n.position < p.fire_threshold ? p.g_parallel : p.g_antiparallel;
}

// Linear DW velocity, zeroed when the motion would push the wall past a
// track end.
inline double dw_velocity(double position, double current, double mobility, double width) {
    const double v = mobility * current;
    if (position <= 0.0 && v < 0.0) return 0.0;
    if (position >= width && v > 0.0) return 0.0;
    return v;
}

// One time step of synapse DW motion. Positive current (the S2->S1 feedback
// direction for a Gnd input) moves the wall toward the anti-parallel end and
// lowers the conductance.
inline SynapseState step_synapse(SynapseState s, double current, const DeviceParams& p) {
    const double v = dw_velocity(s.position, current, p.mobility_synapse, p.track_width_synapse);
    const double next = s.position + p.dt * v;
    return {std::clamp(next, 0.0, p.track_width_synapse)};
}

// One time step of neuron integrate-and-leak. Feed-forward current drives the
// wall toward the fired end (x = 0); the leak restores it toward w_n. The
// firing latch is sticky until reset_neuron.
inline NeuronState step_neuron(NeuronState n, double current, const DeviceParams& p) {
    if (current < 0.0) {
        throw ContractError("step_neuron: negative feed-forward current " + std::to_string(current));
    }
    const double next = std::clamp(n.position - p.dt * p.mobility_neuron * current + p.dt * p.leak_rate,
                                   0.0, p.track_width_neuron);
    const bool fired = n.fired || next <= p.fire_threshold;
    return {next, fired};
}

inline NeuronState reset_neuron(NeuronState, const DeviceParams& p) {
    return {p.track_width_neuron, false};
}

} // namespace dwmtj
