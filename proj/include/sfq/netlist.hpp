#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfq/devices.hpp"

namespace sfq {

enum class NodeKind { Source, Synapse, Merger, Splitter, Neuron, Probe };

const char* to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& s);

struct NodeDecl {
    std::string name;
    NodeKind kind = NodeKind::Source;
    std::map<std::string, double> params;  // values already unit-normalized (GHz/ps/uA)
    int line = 0;

    double param_or(const std::string& key, double fallback) const;
};

// Input ports of a neuron. Everything else has a single anonymous input.
enum class InputPort { Default, Exc, Inh };

struct Edge {
    std::string from;
    int from_branch = -1;  // splitter branch index, -1 when unused
    std::string to;
    InputPort to_port = InputPort::Default;
    int line = 0;
};

struct NetworkSpec {
    std::vector<NodeDecl> nodes;
    std::vector<Edge> edges;
    std::uint64_t seed = 0;
    double duration_ps = 10000.0;

    const NodeDecl* find_node(const std::string& name) const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    int line = 0;        // 0 when not tied to a source line
    std::string subject;  // node or edge reference, may be empty
};

struct ParseResult {
    NetworkSpec spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const;
};

// Line-oriented netlist grammar:
//   # comment
//   set seed=<int>
//   set duration=<ps>
//   node <kind> <name> key=value ...
//   edge <from[.port]> <to[.port]>
// Dimensioned values carry mandatory unit suffixes (GHz, ps, uA); dimensionless
// keys (weight, theta, fanout, poisson, clamp_floor) are bare numbers.
// tau_leak accepts `inf` for no leak.
ParseResult parse_netlist(const std::string& text);

std::string serialize_netlist(const NetworkSpec& spec);

// Structural checks: acyclicity, port legality, single-driver rule,
// fan-out-via-splitter rule, undriven-input warnings.
std::vector<Diagnostic> validate(const NetworkSpec& spec);

bool has_errors(const std::vector<Diagnostic>& diags);

// Re-routes every output port with out-degree > 1 through a minimal-depth
// splitter tree. Idempotent; the result passes validate with 0 errors
// whenever the input only violated the single-driver rule.
NetworkSpec expand_fanout(const NetworkSpec& spec, const SplitterParams& sp);

SynapseParams synapse_params_from_node(const NodeDecl& node);
NeuronParams neuron_params_from_node(const NodeDecl& node);
MergerParams merger_params_from_node(const NodeDecl& node);
SplitterParams splitter_params_from_node(const NodeDecl& node);

}  // namespace sfq
