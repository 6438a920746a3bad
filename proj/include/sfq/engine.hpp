#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sfq/devices.hpp"
#include "sfq/netlist.hpp"
#include "sfq/pulse.hpp"

namespace sfq {

struct EngineConfig {
    double duration_ps = 10000.0;
    std::uint64_t seed = 0;
    double transient_skip_fraction = 0.2;  // rates measured on [skip*duration, duration)
    bool trace_states = false;
    std::uint64_t event_cap = 100'000'000;
};

struct SimResult {
    std::map<std::string, PulseTrain> probe_trains;
    std::map<std::string, double> probe_rates_ghz;
    std::map<std::string, std::uint64_t> node_switches;
    std::uint64_t switch_count = 0;
    double energy_j = 0.0;
    std::map<std::string, NeuronTrace> traces;  // populated when trace_states
};

struct EnergyReport {
    std::map<std::string, std::uint64_t> node_switches;
    std::uint64_t total_switches = 0;
    double total_j = 0.0;
};

// Deterministic event-driven execution. The spec must pass validate with 0
// errors; per-node RNG streams derive from (cfg.seed, node name) so adding a
// node never perturbs another node's randomness. Synapses, mergers, and
// neurons are zero-delay; only splitters add delay.
SimResult simulate(const NetworkSpec& spec, const EngineConfig& cfg);

EnergyReport energy_report(const SimResult& result);

std::string probe_rates_to_csv(const SimResult& result);

}  // namespace sfq
