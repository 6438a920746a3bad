#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sfq/pulse.hpp"

namespace sfq {

// Stochastic-pass synapse: a balanced comparator whose grey zone is modeled
// as a Gaussian CDF of the applied bias current.
struct SynapseParams {
    double i_c_ua = 150.0;       // junction critical current
    double i_center_ua = 100.0;  // grey-zone center bias
    double sigma_gz_ua = 15.0;   // grey-zone width, > 0
    double i_b_ua = 100.0;       // applied bias current
};

struct NeuronParams {
    double theta = 2.0;        // firing threshold, stored fluxons
    double tau_leak_ps = 500.0;  // L/R leak time constant; +inf disables leak
    double t_ref_ps = 30.0;    // refractory dead time after an output pulse
    double clamp_floor = 0.0;  // minimum state, fluxon units
};

struct MergerParams {
    double t_dead_ps = 30.0;
};

struct SplitterParams {
    double delay_ps = 5.0;
    int fanout = 2;
};

struct NeuronTrace {
    std::vector<std::pair<double, double>> samples;  // (time ps, state fluxons)
    PulseTrain output;
};

constexpr double kNoLeak = std::numeric_limits<double>::infinity();

// Standard normal CDF of (i_b - i_center)/sigma_gz; strictly increasing in i_b.
double pass_probability(const SynapseParams& p);

// Inverse of pass_probability in i_b; w in (0,1), exact 0/1 clamp to -/+6 sigma.
double bias_for_weight(const SynapseParams& p, double weight);

// Bernoulli thinning: each pulse kept independently with pass_probability(p).
PulseTrain synapse_gate(const SynapseParams& p, const PulseTrain& input, std::uint64_t seed);

// Incremental LIF state machine, shared verbatim by neuron_process and the
// event engine so the two paths cannot drift apart.
class NeuronState {
  public:
    explicit NeuronState(const NeuronParams& p) : p_(p), state_(0.0) {}

    // Advances the leak to time t, applies one input pulse, and reports
    // whether an output pulse is emitted at t.
    bool on_event(double t, bool inhibitory);

    double state() const { return state_; }

  private:
    NeuronParams p_;
    double state_;
    double t_last_ = 0.0;
    double last_output_ = -std::numeric_limits<double>::infinity();
};

// Dead-time server shared by merger_process and the event engine: each
// accepted pulse is emitted no earlier than t_dead after the previous
// emission, so the output rate saturates hard at 1/t_dead. Exactly
// coincident input pulses collapse to one.
class MergerState {
  public:
    explicit MergerState(const MergerParams& p) : p_(p) {}

    // Emission time for the input event at t, or no value when it collapses.
    // Inputs must arrive in nondecreasing time order.
    std::optional<double> on_event(double t);

  private:
    MergerParams p_;
    double last_input_ = -std::numeric_limits<double>::infinity();
    double next_free_ = -std::numeric_limits<double>::infinity();
};

NeuronTrace neuron_process(const NeuronParams& p, const PulseTrain& excitatory,
                           const PulseTrain& inhibitory);

PulseTrain merger_process(const MergerParams& p, const std::vector<PulseTrain>& inputs);

std::vector<PulseTrain> splitter_process(const SplitterParams& p, const PulseTrain& input);

}  // namespace sfq
