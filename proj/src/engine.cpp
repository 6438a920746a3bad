#include "sfq/engine.hpp"

#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sfq/rng.hpp"

namespace sfq {

namespace {

struct Event {
    double time;
    std::size_t target;
    bool inhibitory;  // port priority: inh processed before exc at equal time
    std::uint64_t seq;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.target != b.target) return a.target > b.target;
        if (a.inhibitory != b.inhibitory) return !a.inhibitory;
        return a.seq > b.seq;
    }
};

struct Target {
    std::size_t node;
    bool inhibitory;
};

struct RuntimeNode {
    const NodeDecl* decl = nullptr;

    // Compiled parameters; only the ones matching `decl->kind` are meaningful.
    SynapseParams synapse;
    NeuronParams neuron;
    MergerParams merger;
    SplitterParams splitter;
    double pass = 0.0;

    std::optional<Target> target;        // non-splitter output
    std::vector<std::optional<Target>> branch_targets;

    std::mt19937_64 rng;
    std::optional<NeuronState> neuron_state;
    std::optional<MergerState> merger_state;
    std::uint64_t switches = 0;
};

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimResult simulate(const NetworkSpec& spec, const EngineConfig& cfg) {
    if (!(cfg.duration_ps > 0.0)) throw std::invalid_argument("simulate: duration must be > 0");
    if (has_errors(validate(spec))) {
        throw std::invalid_argument("simulate: spec does not pass validation");
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) index[spec.nodes[i].name] = i;

    std::vector<RuntimeNode> nodes(spec.nodes.size());
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        RuntimeNode& rt = nodes[i];
        rt.decl = &spec.nodes[i];
        switch (rt.decl->kind) {
            case NodeKind::Synapse:
                rt.synapse = synapse_params_from_node(*rt.decl);
                rt.pass = pass_probability(rt.synapse);
                rt.rng.seed(node_stream_seed(cfg.seed, rt.decl->name));
                break;
            case NodeKind::Neuron:
                rt.neuron = neuron_params_from_node(*rt.decl);
                rt.neuron_state.emplace(rt.neuron);
                break;
            case NodeKind::Merger:
                rt.merger = merger_params_from_node(*rt.decl);
                rt.merger_state.emplace(rt.merger);
                break;
            case NodeKind::Splitter:
                rt.splitter = splitter_params_from_node(*rt.decl);
                rt.branch_targets.assign(static_cast<std::size_t>(rt.splitter.fanout), std::nullopt);
                break;
            default:
                break;
        }
    }

    for (const Edge& edge : spec.edges) {
        RuntimeNode& from = nodes[index.at(edge.from)];
        Target target{index.at(edge.to), edge.to_port == InputPort::Inh};
        if (from.decl->kind == NodeKind::Splitter) {
            from.branch_targets[static_cast<std::size_t>(edge.from_branch)] = target;
        } else {
            from.target = target;
        }
    }

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
    std::uint64_t seq = 0;
    auto push = [&](double t, const std::optional<Target>& target) {
        if (target) queue.push({t, target->node, target->inhibitory, seq++});
    };

    for (const RuntimeNode& rt : nodes) {
        if (rt.decl->kind != NodeKind::Source) continue;
        const double rate = rt.decl->params.at("rate");
        PulseTrain train;
        if (rt.decl->param_or("poisson", 0.0) != 0.0) {
            train = poisson_train(rate, cfg.duration_ps, node_stream_seed(cfg.seed, rt.decl->name));
        } else {
            train = regular_train(rate, cfg.duration_ps, rt.decl->param_or("phase", 0.0));
        }
        for (double t : train) push(t, rt.target);
    }

    SimResult result;
    for (const RuntimeNode& rt : nodes) {
        if (rt.decl->kind == NodeKind::Probe) result.probe_trains[rt.decl->name];
        if (cfg.trace_states && rt.decl->kind == NodeKind::Neuron) result.traces[rt.decl->name];
    }

    std::uint64_t processed = 0;
    while (!queue.empty()) {
        if (++processed > cfg.event_cap) {
            throw std::runtime_error("simulate: event cap exceeded");
        }
        const Event ev = queue.top();
        queue.pop();
        RuntimeNode& rt = nodes[ev.target];
        switch (rt.decl->kind) {
            case NodeKind::Synapse:
                rt.switches += 1;
                if (uniform01(rt.rng) < rt.pass) push(ev.time, rt.target);
                break;
            case NodeKind::Merger:
                if (auto emit = rt.merger_state->on_event(ev.time)) {
                    rt.switches += 1;
                    push(*emit, rt.target);
                }
                break;
            case NodeKind::Neuron: {
                rt.switches += 1;
                const bool fired = rt.neuron_state->on_event(ev.time, ev.inhibitory);
                if (cfg.trace_states) {
                    result.traces[rt.decl->name].samples.emplace_back(ev.time,
                                                                      rt.neuron_state->state());
                }
                if (fired) {
                    rt.switches += 1;
                    if (cfg.trace_states) result.traces[rt.decl->name].output.push_back(ev.time);
                    push(ev.time, rt.target);
                }
                break;
            }
            case NodeKind::Splitter:
                rt.switches += static_cast<std::uint64_t>(rt.splitter.fanout);
                for (const auto& target : rt.branch_targets) {
                    push(ev.time + rt.splitter.delay_ps, target);
                }
                break;
            case NodeKind::Probe:
                if (ev.time < cfg.duration_ps) {
                    result.probe_trains[rt.decl->name].push_back(ev.time);
                }
                break;
            case NodeKind::Source:
                break;  // sources only emit
        }
    }

    const double skip = cfg.transient_skip_fraction * cfg.duration_ps;
    for (const auto& [name, train] : result.probe_trains) {
        result.probe_rates_ghz[name] = measure_rate(train, skip, cfg.duration_ps).rate_ghz;
    }
    for (const RuntimeNode& rt : nodes) {
        result.node_switches[rt.decl->name] = rt.switches;
        result.switch_count += rt.switches;
    }
    result.energy_j = static_cast<double>(result.switch_count) * PhysicalConstants::switch_energy_j;
    return result;
}

EnergyReport energy_report(const SimResult& result) {
    EnergyReport report;
    report.node_switches = result.node_switches;
    report.total_switches = result.switch_count;
    report.total_j = result.energy_j;
    return report;
}

std::string probe_rates_to_csv(const SimResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "probe,rate_ghz\n";
    for (const auto& [name, rate] : result.probe_rates_ghz) {
        out << name << "," << rate << "\n";
    }
    return out.str();
}

}  // namespace sfq
