#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sfq/devices.hpp"
#include "sfq/engine.hpp"
#include "sfq/netlist.hpp"

namespace sfq {

// Smooth saturating activation: r_out = r_sat * tanh(gain * softplus(r_net - r_thr) / r_sat)
// with softplus_beta(x) = beta * ln(1 + exp(x / beta)). Monotone, bounded by
// r_sat, differentiable everywhere.
struct ActivationModel {
    double r_sat_ghz = 33.3;
    double r_thr_ghz = 0.0;
    double gain = 1.0;
    double beta_ghz = 2.0;
};

using RateVector = std::map<std::string, double>;

double activation(const ActivationModel& m, double r_net_ghz);
double activation_derivative(const ActivationModel& m, double r_net_ghz);

// Smooth dead-time saturation: R / (1 + R * t_dead); always <= 1/t_dead.
double merger_rate(double t_dead_ps, const std::vector<double>& rates_ghz);
double merger_rate_derivative(double t_dead_ps, double total_rate_ghz);

// Topological steady-state rate evaluation. Sources emit their rate, synapses
// scale by pass probability, mergers apply merger_rate, neurons apply the
// model from `models` (default-constructed when absent) to exc - inh,
// splitters and probes copy.
RateVector propagate_rates(const NetworkSpec& spec,
                           const std::map<std::string, ActivationModel>& models);

// Event-engine measurement of the activation curve on source -> neuron -> probe.
std::vector<std::pair<double, double>> characterize_neuron(const NeuronParams& p,
                                                           const std::vector<double>& grid_ghz,
                                                           const EngineConfig& cfg);

struct ActivationFit {
    ActivationModel model;
    double rms_ghz = 0.0;
};

// Levenberg-Marquardt least squares over (r_sat, r_thr, gain, beta).
// Requires >= 8 samples spanning sub- and supra-threshold inputs.
ActivationFit fit_activation(const std::vector<std::pair<double, double>>& samples);

std::string activation_model_to_text(const ActivationModel& m);
ActivationModel activation_model_from_text(const std::string& text);

std::string samples_to_csv(const std::vector<std::pair<double, double>>& samples);

}  // namespace sfq
