#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfq/engine.hpp"
#include "sfq/netlist.hpp"
#include "sfq/ratemodel.hpp"
#include "sfq/trainer.hpp"

namespace sfq {

// Shared subcommand implementations. The CLI and the test suite both call
// these so reproducibility checks compare byte-identical artifacts.

struct SynapseSweep {
    double i_b_lo_ua = 40.0;
    double i_b_hi_ua = 160.0;
    int steps = 25;
    std::size_t pulses_per_point = 10000;
    double input_rate_ghz = 50.0;
};

// Columns: i_b_ua,p_emp,p_model. Empirical pass fraction of Bernoulli-gated
// regular pulses against the grey-zone CDF model.
std::string characterize_synapse_csv(const SynapseParams& base, const SynapseSweep& sweep,
                                     std::uint64_t seed);

// Columns: r_in_norm,r_out_norm (normalized to r_norm_ghz).
std::string characterize_neuron_csv(const NeuronParams& p, const std::vector<double>& grid_ghz,
                                    const EngineConfig& cfg, double r_norm_ghz);

// Device parameters used by the XOR pipeline: theta 1, no leak, short
// refractory, deep inhibitory clamp, fast mergers.
SynapseParams xor_synapse_params();
NeuronParams xor_neuron_params();
MergerParams xor_merger_params();
SplitterParams xor_splitter_params();

struct XorArtifacts {
    TrainResult training;
    NetworkSpec network;
    std::string model_text;
    std::string netlist_text;
};

XorArtifacts train_xor_pipeline(std::uint64_t seed, const TrainConfig& cfg);

// Sets input source `inK` to the given normalized rate with its golden-ratio
// phase stagger; rate 0 gives an empty train.
void set_input_rate(NetworkSpec& spec, std::size_t input_index, double rate_norm,
                    double r_norm_ghz);

// Output probe rate in normalized units for one input pattern.
double simulate_xor_point(const NetworkSpec& network, double a_norm, double b_norm,
                          const EngineConfig& cfg, double r_norm_ghz);

// Columns: r_a_norm,r_b_norm,r_out_norm over a grid_n x grid_n grid of
// [0, 2] x [0, 2]; grid points simulate concurrently, output order is fixed.
std::string phase_diagram_csv(const NetworkSpec& network, int grid_n, const EngineConfig& cfg,
                              double r_norm_ghz);

}  // namespace sfq
