#include "sfq/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sfq {

namespace {

enum class Unit { None, Ghz, Ps, Ua };

struct KeySpec {
    Unit unit;
    bool required;
    bool allow_inf = false;
};

const std::map<NodeKind, std::map<std::string, KeySpec>>& key_table() {
    static const std::map<NodeKind, std::map<std::string, KeySpec>> table = {
        {NodeKind::Source,
         {{"rate", {Unit::Ghz, true}}, {"phase", {Unit::Ps, false}}, {"poisson", {Unit::None, false}}}},
        {NodeKind::Synapse,
         {{"weight", {Unit::None, false}},
          {"i_b", {Unit::Ua, false}},
          {"i_c", {Unit::Ua, false}},
          {"i_center", {Unit::Ua, false}},
          {"sigma_gz", {Unit::Ua, false}}}},
        {NodeKind::Merger, {{"t_dead", {Unit::Ps, false}}}},
        {NodeKind::Splitter, {{"delay", {Unit::Ps, false}}, {"fanout", {Unit::None, false}}}},
        {NodeKind::Neuron,
         {{"theta", {Unit::None, true}},
          {"tau_leak", {Unit::Ps, true, true}},
          {"t_ref", {Unit::Ps, true}},
          {"clamp_floor", {Unit::None, false}}}},
        {NodeKind::Probe, {}},
    };
    return table;
}

const char* unit_suffix(Unit u) {
    switch (u) {
        case Unit::Ghz: return "GHz";
        case Unit::Ps: return "ps";
        case Unit::Ua: return "uA";
        default: return "";
    }
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

// Parses "<number><suffix>" or "inf<suffix>"; returns false on malformed input.
bool parse_value(const std::string& text, Unit expected, bool allow_inf, double& out) {
    std::string num = text;
    Unit got = Unit::None;
    for (Unit u : {Unit::Ghz, Unit::Ps, Unit::Ua}) {
        const std::string suffix = unit_suffix(u);
        if (text.size() > suffix.size() &&
            text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
            got = u;
            num = text.substr(0, text.size() - suffix.size());
            break;
        }
    }
    if (got != expected) return false;
    if (allow_inf && (num == "inf" || num == "Inf")) {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    try {
        std::size_t pos = 0;
        out = std::stod(num, &pos);
        return pos == num.size();
    } catch (const std::exception&) {
        return false;
    }
}

struct PortRef {
    std::string node;
    std::string port;  // raw text after '.', empty when absent
};

PortRef split_port(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos) return {text, ""};
    return {text.substr(0, dot), text.substr(dot + 1)};
}

std::string format_number(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Source: return "source";
        case NodeKind::Synapse: return "synapse";
        case NodeKind::Merger: return "merger";
        case NodeKind::Splitter: return "splitter";
        case NodeKind::Neuron: return "neuron";
        case NodeKind::Probe: return "probe";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    for (NodeKind k : {NodeKind::Source, NodeKind::Synapse, NodeKind::Merger, NodeKind::Splitter,
                       NodeKind::Neuron, NodeKind::Probe}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

double NodeDecl::param_or(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

const NodeDecl* NetworkSpec::find_node(const std::string& name) const {
    for (const auto& n : nodes) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

bool ParseResult::ok() const { return !has_errors(diagnostics); }

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

ParseResult parse_netlist(const std::string& text) {
    ParseResult result;
    std::set<std::string> names;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    auto error = [&](int line, std::string msg, std::string subject = "") {
        result.diagnostics.push_back({Severity::Error, std::move(msg), line, std::move(subject)});
    };

    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto tokens = split_ws(raw);
        if (tokens.empty()) continue;

        if (tokens[0] == "set") {
            if (tokens.size() != 2) {
                error(line_no, "set expects a single key=value");
                continue;
            }
            auto eq = tokens[1].find('=');
            if (eq == std::string::npos) {
                error(line_no, "malformed set directive");
                continue;
            }
            const std::string key = tokens[1].substr(0, eq);
            const std::string val = tokens[1].substr(eq + 1);
            if (key == "seed") {
                try {
                    result.spec.seed = std::stoull(val);
                } catch (const std::exception&) {
                    error(line_no, "malformed seed value '" + val + "'");
                }
            } else if (key == "duration") {
                double d = 0.0;
                if (!parse_value(val, Unit::Ps, false, d) || !(d > 0.0)) {
                    error(line_no, "malformed duration '" + val + "' (expected e.g. 10000ps)");
                } else {
                    result.spec.duration_ps = d;
                }
            } else {
                error(line_no, "unknown set key '" + key + "'");
            }
        } else if (tokens[0] == "node") {
            if (tokens.size() < 3) {
                error(line_no, "node expects: node <kind> <name> key=value ...");
                continue;
            }
            auto kind = node_kind_from_string(tokens[1]);
            if (!kind) {
                error(line_no, "unknown node kind '" + tokens[1] + "'");
                continue;
            }
            if (!is_identifier(tokens[2])) {
                error(line_no, "invalid identifier '" + tokens[2] + "'");
                continue;
            }
            if (!names.insert(tokens[2]).second) {
                error(line_no, "duplicate node name '" + tokens[2] + "'", tokens[2]);
                continue;
            }
            NodeDecl node;
            node.name = tokens[2];
            node.kind = *kind;
            node.line = line_no;
            const auto& keys = key_table().at(*kind);
            bool bad = false;
            for (std::size_t i = 3; i < tokens.size(); ++i) {
                auto eq = tokens[i].find('=');
                if (eq == std::string::npos) {
                    error(line_no, "malformed key=value '" + tokens[i] + "'", node.name);
                    bad = true;
                    continue;
                }
                const std::string key = tokens[i].substr(0, eq);
                const std::string val = tokens[i].substr(eq + 1);
                auto spec_it = keys.find(key);
                if (spec_it == keys.end()) {
                    error(line_no, "unknown key '" + key + "' for kind " + to_string(*kind), node.name);
                    bad = true;
                    continue;
                }
                double v = 0.0;
                if (!parse_value(val, spec_it->second.unit, spec_it->second.allow_inf, v)) {
                    const char* suffix = unit_suffix(spec_it->second.unit);
                    error(line_no,
                          "malformed value '" + val + "' for key '" + key + "'" +
                              (spec_it->second.unit != Unit::None
                                   ? std::string(" (unit suffix ") + suffix + " required)"
                                   : std::string(" (bare number expected)")),
                          node.name);
                    bad = true;
                    continue;
                }
                node.params[key] = v;
            }
            for (const auto& [key, ks] : keys) {
                if (ks.required && !node.params.count(key)) {
                    error(line_no, "missing required key '" + key + "' for kind " + to_string(*kind),
                          node.name);
                    bad = true;
                }
            }
            if (node.kind == NodeKind::Synapse) {
                const bool has_w = node.params.count("weight") > 0;
                const bool has_ib = node.params.count("i_b") > 0;
                if (has_w == has_ib) {
                    error(line_no, "synapse requires exactly one of weight= or i_b=", node.name);
                    bad = true;
                } else if (has_w && (node.params["weight"] < 0.0 || node.params["weight"] > 1.0)) {
                    error(line_no, "synapse weight must lie in [0,1]", node.name);
                    bad = true;
                }
            }
            if (!bad) result.spec.nodes.push_back(std::move(node));
        } else if (tokens[0] == "edge") {
            if (tokens.size() != 3) {
                error(line_no, "edge expects: edge <from[.port]> <to[.port]>");
                continue;
            }
            Edge edge;
            edge.line = line_no;
            PortRef from = split_port(tokens[1]);
            PortRef to = split_port(tokens[2]);
            if (!is_identifier(from.node) || !is_identifier(to.node)) {
                error(line_no, "invalid edge endpoint identifier");
                continue;
            }
            edge.from = from.node;
            edge.to = to.node;
            if (!from.port.empty()) {
                try {
                    std::size_t pos = 0;
                    edge.from_branch = std::stoi(from.port, &pos);
                    if (pos != from.port.size() || edge.from_branch < 0) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    error(line_no, "malformed splitter branch port '." + from.port + "'");
                    continue;
                }
            }
            if (!to.port.empty()) {
                if (to.port == "exc") {
                    edge.to_port = InputPort::Exc;
                } else if (to.port == "inh") {
                    edge.to_port = InputPort::Inh;
                } else {
                    error(line_no, "unknown input port '." + to.port + "' (expected exc or inh)");
                    continue;
                }
            }
            result.spec.edges.push_back(std::move(edge));
        } else {
            error(line_no, "unknown directive '" + tokens[0] + "'");
        }
    }
    return result;
}

std::string serialize_netlist(const NetworkSpec& spec) {
    std::ostringstream out;
    out << "set seed=" << spec.seed << "\n";
    out << "set duration=" << format_number(spec.duration_ps) << "ps\n";
    for (const auto& node : spec.nodes) {
        out << "node " << to_string(node.kind) << " " << node.name;
        const auto& keys = key_table().at(node.kind);
        for (const auto& [key, value] : node.params) {
            auto it = keys.find(key);
            const char* suffix = it != keys.end() ? unit_suffix(it->second.unit) : "";
            out << " " << key << "=" << format_number(value) << suffix;
        }
        out << "\n";
    }
    for (const auto& edge : spec.edges) {
        out << "edge " << edge.from;
        if (edge.from_branch >= 0) out << "." << edge.from_branch;
        out << " " << edge.to;
        if (edge.to_port == InputPort::Exc) out << ".exc";
        if (edge.to_port == InputPort::Inh) out << ".inh";
        out << "\n";
    }
    return out.str();
}

std::vector<Diagnostic> validate(const NetworkSpec& spec) {
    std::vector<Diagnostic> diags;
    auto error = [&](std::string msg, int line = 0, std::string subject = "") {
        diags.push_back({Severity::Error, std::move(msg), line, std::move(subject)});
    };
    auto warn = [&](std::string msg, int line = 0, std::string subject = "") {
        diags.push_back({Severity::Warning, std::move(msg), line, std::move(subject)});
    };

    std::map<std::string, const NodeDecl*> by_name;
    for (const auto& node : spec.nodes) {
        if (!by_name.emplace(node.name, &node).second) {
            error("duplicate node name '" + node.name + "'", node.line, node.name);
        }
    }

    // (node, branch) -> out-degree; (node, port) -> in-degree
    std::map<std::pair<std::string, int>, int> out_degree;
    std::map<std::pair<std::string, int>, int> in_degree;

    for (const auto& edge : spec.edges) {
        auto from_it = by_name.find(edge.from);
        auto to_it = by_name.find(edge.to);
        if (from_it == by_name.end()) {
            error("edge references unknown node '" + edge.from + "'", edge.line);
            continue;
        }
        if (to_it == by_name.end()) {
            error("edge references unknown node '" + edge.to + "'", edge.line);
            continue;
        }
        const NodeDecl& from = *from_it->second;
        const NodeDecl& to = *to_it->second;
        bool port_ok = true;
        if (from.kind == NodeKind::Probe) {
            error("probe '" + from.name + "' cannot drive edges", edge.line);
            port_ok = false;
        }
        if (from.kind == NodeKind::Splitter) {
            const int fanout = static_cast<int>(from.param_or("fanout", 2));
            if (edge.from_branch < 0 || edge.from_branch >= fanout) {
                error("splitter '" + from.name + "' requires a branch port .0 .. ." +
                          std::to_string(fanout - 1),
                      edge.line);
                port_ok = false;
            }
        } else if (edge.from_branch >= 0) {
            error("branch port on non-splitter '" + from.name + "'", edge.line);
            port_ok = false;
        }
        if (to.kind == NodeKind::Source) {
            error("source '" + to.name + "' cannot be an edge target", edge.line);
            port_ok = false;
        }
        if (to.kind != NodeKind::Neuron && edge.to_port != InputPort::Default) {
            error("exc/inh ports only exist on neurons (target '" + to.name + "')", edge.line);
            port_ok = false;
        }
        if (!port_ok) continue;
        out_degree[{edge.from, edge.from_branch}]++;
        const int port_id = (to.kind == NodeKind::Neuron && edge.to_port == InputPort::Inh) ? 1 : 0;
        in_degree[{edge.to, port_id}]++;
    }

    for (const auto& [port, degree] : out_degree) {
        if (degree > 1) {
            const NodeDecl* node = by_name.count(port.first) ? by_name[port.first] : nullptr;
            if (node && node->kind == NodeKind::Splitter) {
                error("splitter branch '" + port.first + "." + std::to_string(port.second) +
                          "' drives " + std::to_string(degree) + " edges; fan-out requires splitter",
                      0, port.first);
            } else {
                error("output of '" + port.first + "' drives " + std::to_string(degree) +
                          " edges; fan-out requires splitter",
                      0, port.first);
            }
        }
    }

    for (const auto& [port, degree] : in_degree) {
        if (degree <= 1) continue;
        const NodeDecl* node = by_name.count(port.first) ? by_name[port.first] : nullptr;
        // Mergers are the fan-in device; everything else takes a single driver.
        if (node && node->kind == NodeKind::Merger) continue;
        error("input port of '" + port.first + "' has " + std::to_string(degree) +
                  " drivers; fan-in requires merger",
              0, port.first);
    }

    for (const auto& node : spec.nodes) {
        switch (node.kind) {
            case NodeKind::Synapse:
            case NodeKind::Merger:
            case NodeKind::Splitter:
            case NodeKind::Probe:
                if (!in_degree.count({node.name, 0})) {
                    warn("input of '" + node.name + "' is undriven", node.line, node.name);
                }
                break;
            case NodeKind::Neuron:
                if (!in_degree.count({node.name, 0})) {
                    warn("excitatory input of '" + node.name + "' is undriven", node.line, node.name);
                }
                break;
            case NodeKind::Source:
                break;
        }
    }

    // Kahn's algorithm over node-level adjacency.
    std::map<std::string, int> incoming;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& node : spec.nodes) incoming[node.name] = 0;
    for (const auto& edge : spec.edges) {
        if (!by_name.count(edge.from) || !by_name.count(edge.to)) continue;
        adj[edge.from].push_back(edge.to);
        incoming[edge.to]++;
    }
    std::deque<std::string> ready;
    for (const auto& [name, deg] : incoming) {
        if (deg == 0) ready.push_back(name);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::string name = ready.front();
        ready.pop_front();
        ++visited;
        for (const auto& next : adj[name]) {
            if (--incoming[next] == 0) ready.push_back(next);
        }
    }
    if (visited != by_name.size()) {
        error("network graph contains a cycle; only feed-forward graphs are supported");
    }

    return diags;
}

NetworkSpec expand_fanout(const NetworkSpec& spec, const SplitterParams& sp) {
    NetworkSpec out = spec;
    out.edges.clear();

    std::set<std::string> names;
    for (const auto& node : out.nodes) names.insert(node.name);
    int counter = 0;
    auto fresh_name = [&](const std::string& base) {
        std::string name;
        do {
            name = base + "__sp" + std::to_string(counter++);
        } while (names.count(name));
        names.insert(name);
        return name;
    };

    // Sinks grouped per originating output port, in declaration order.
    struct Sink {
        std::string to;
        InputPort port;
    };
    std::vector<std::pair<std::pair<std::string, int>, std::vector<Sink>>> ports;
    auto port_sinks = [&](const std::string& from, int branch) -> std::vector<Sink>& {
        for (auto& [key, sinks] : ports) {
            if (key.first == from && key.second == branch) return sinks;
        }
        ports.push_back({{from, branch}, {}});
        return ports.back().second;
    };
    for (const auto& edge : spec.edges) {
        port_sinks(edge.from, edge.from_branch).push_back({edge.to, edge.to_port});
    }

    // Recursive balanced tree construction; group count per branch differs by
    // at most one, which gives minimal depth.
    auto connect = [&](auto&& self, const std::string& from, int branch,
                       const std::vector<Sink>& sinks) -> void {
        if (sinks.size() == 1) {
            out.edges.push_back({from, branch, sinks[0].to, sinks[0].port, 0});
            return;
        }
        NodeDecl splitter;
        splitter.name = fresh_name(from);
        splitter.kind = NodeKind::Splitter;
        splitter.params["delay"] = sp.delay_ps;
        splitter.params["fanout"] = static_cast<double>(sp.fanout);
        out.nodes.push_back(splitter);
        out.edges.push_back({from, branch, splitter.name, InputPort::Default, 0});

        const std::size_t groups =
            std::min<std::size_t>(static_cast<std::size_t>(sp.fanout), sinks.size());
        std::size_t offset = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t count = sinks.size() / groups + (g < sinks.size() % groups ? 1 : 0);
            std::vector<Sink> group(sinks.begin() + offset, sinks.begin() + offset + count);
            offset += count;
            self(self, splitter.name, static_cast<int>(g), group);
        }
    };

    for (const auto& [key, sinks] : ports) {
        connect(connect, key.first, key.second, sinks);
    }
    return out;
}

SynapseParams synapse_params_from_node(const NodeDecl& node) {
    SynapseParams base;
    SynapseParams p;
    p.i_c_ua = node.param_or("i_c", base.i_c_ua);
    p.i_center_ua = node.param_or("i_center", base.i_center_ua);
    p.sigma_gz_ua = node.param_or("sigma_gz", base.sigma_gz_ua);
    if (node.params.count("i_b")) {
        p.i_b_ua = node.params.at("i_b");
    } else {
        p.i_b_ua = bias_for_weight(p, node.param_or("weight", 0.5));
    }
    return p;
}

NeuronParams neuron_params_from_node(const NodeDecl& node) {
    NeuronParams base;
    NeuronParams p;
    p.theta = node.param_or("theta", base.theta);
    p.tau_leak_ps = node.param_or("tau_leak", base.tau_leak_ps);
    p.t_ref_ps = node.param_or("t_ref", base.t_ref_ps);
    p.clamp_floor = node.param_or("clamp_floor", base.clamp_floor);
    return p;
}

MergerParams merger_params_from_node(const NodeDecl& node) {
    MergerParams base;
    return MergerParams{node.param_or("t_dead", base.t_dead_ps)};
}

SplitterParams splitter_params_from_node(const NodeDecl& node) {
    SplitterParams base;
    SplitterParams p;
    p.delay_ps = node.param_or("delay", base.delay_ps);
    p.fanout = static_cast<int>(node.param_or("fanout", base.fanout));
    return p;
}

}  // namespace sfq
