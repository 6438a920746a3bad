#include "sfq/pipelines.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sfq/rng.hpp"

namespace sfq {

std::string characterize_synapse_csv(const SynapseParams& base, const SynapseSweep& sweep,
                                     std::uint64_t seed) {
    if (sweep.steps < 2 || !(sweep.i_b_hi_ua > sweep.i_b_lo_ua)) {
        throw std::invalid_argument("characterize_synapse: bad sweep bounds");
    }
    const double period_ps = kGhzPerInversePs / sweep.input_rate_ghz;
    const double duration_ps = static_cast<double>(sweep.pulses_per_point) * period_ps;
    const PulseTrain input = regular_train(sweep.input_rate_ghz, duration_ps);

    std::ostringstream out;
    out.precision(17);
    out << "i_b_ua,p_emp,p_model\n";
    for (int k = 0; k < sweep.steps; ++k) {
        SynapseParams p = base;
        p.i_b_ua = sweep.i_b_lo_ua +
                   (sweep.i_b_hi_ua - sweep.i_b_lo_ua) * static_cast<double>(k) /
                       static_cast<double>(sweep.steps - 1);
        const PulseTrain passed =
            synapse_gate(p, input, node_stream_seed(seed, "sweep" + std::to_string(k)));
        const double p_emp =
            static_cast<double>(passed.size()) / static_cast<double>(input.size());
        out << p.i_b_ua << "," << p_emp << "," << pass_probability(p) << "\n";
    }
    return out.str();
}

std::string characterize_neuron_csv(const NeuronParams& p, const std::vector<double>& grid_ghz,
                                    const EngineConfig& cfg, double r_norm_ghz) {
    const auto samples = characterize_neuron(p, grid_ghz, cfg);
    std::ostringstream out;
    out.precision(17);
    out << "r_in_norm,r_out_norm\n";
    for (const auto& [r_in, r_out] : samples) {
        out << r_in / r_norm_ghz << "," << r_out / r_norm_ghz << "\n";
    }
    return out.str();
}

SynapseParams xor_synapse_params() { return SynapseParams{}; }

NeuronParams xor_neuron_params() { return NeuronParams{1.0, kNoLeak, 10.0, -4.0}; }

MergerParams xor_merger_params() { return MergerParams{2.0}; }

SplitterParams xor_splitter_params() { return SplitterParams{5.0, 2}; }

XorArtifacts train_xor_pipeline(std::uint64_t seed, const TrainConfig& cfg) {
    auto [mlp, data] = build_xor(seed);
    XorArtifacts artifacts;
    artifacts.training = train(mlp, data, cfg);
    artifacts.network = lower_to_network(artifacts.training.mlp, xor_synapse_params(),
                                         xor_neuron_params(), xor_merger_params(),
                                         xor_splitter_params());
    artifacts.model_text = mlp_to_text(artifacts.training.mlp);
    artifacts.netlist_text = serialize_netlist(artifacts.network);
    return artifacts;
}

void set_input_rate(NetworkSpec& spec, std::size_t input_index, double rate_norm,
                    double r_norm_ghz) {
    const std::string name = "in" + std::to_string(input_index);
    for (auto& node : spec.nodes) {
        if (node.name != name) continue;
        if (node.kind != NodeKind::Source) {
            throw std::invalid_argument("set_input_rate: '" + name + "' is not a source");
        }
        const double rate = rate_norm * r_norm_ghz;
        node.params["rate"] = rate;
        node.params["phase"] =
            rate > 0.0 ? golden_phase_fraction(input_index) * (kGhzPerInversePs / rate) : 0.0;
        return;
    }
    throw std::invalid_argument("set_input_rate: no source named '" + name + "'");
}

double simulate_xor_point(const NetworkSpec& network, double a_norm, double b_norm,
                          const EngineConfig& cfg, double r_norm_ghz) {
    NetworkSpec spec = network;
    set_input_rate(spec, 0, a_norm, r_norm_ghz);
    set_input_rate(spec, 1, b_norm, r_norm_ghz);
    const SimResult result = simulate(spec, cfg);
    return result.probe_rates_ghz.at("out0") / r_norm_ghz;
}

std::string phase_diagram_csv(const NetworkSpec& network, int grid_n, const EngineConfig& cfg,
                              double r_norm_ghz) {
    if (grid_n < 2) throw std::invalid_argument("phase_diagram: grid must be at least 2x2");
    const std::size_t total = static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n);
    std::vector<double> values(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
            const int i = static_cast<int>(k) / grid_n;
            const int j = static_cast<int>(k) % grid_n;
            const double a = 2.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
            const double b = 2.0 * static_cast<double>(j) / static_cast<double>(grid_n - 1);
            values[k] = simulate_xor_point(network, a, b, cfg, r_norm_ghz);
        }
    };
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    std::ostringstream out;
    out.precision(17);
    out << "r_a_norm,r_b_norm,r_out_norm\n";
    for (std::size_t k = 0; k < total; ++k) {
        const int i = static_cast<int>(k) / grid_n;
        const int j = static_cast<int>(k) % grid_n;
        out << 2.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1) << ","
            << 2.0 * static_cast<double>(j) / static_cast<double>(grid_n - 1) << "," << values[k]
            << "\n";
    }
    return out.str();
}

}  // namespace sfq
