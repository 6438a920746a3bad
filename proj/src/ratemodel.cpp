#include "sfq/ratemodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace sfq {

namespace {

double softplus(double x, double beta) {
    // beta * log1p(exp(x/beta)) with overflow guard for large x/beta.
    const double z = x / beta;
    if (z > 30.0) return x;
    return beta * std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double activation(const ActivationModel& m, double r_net_ghz) {
    const double u = m.gain * softplus(r_net_ghz - m.r_thr_ghz, m.beta_ghz) / m.r_sat_ghz;
    return m.r_sat_ghz * std::tanh(u);
}

double activation_derivative(const ActivationModel& m, double r_net_ghz) {
    const double u = m.gain * softplus(r_net_ghz - m.r_thr_ghz, m.beta_ghz) / m.r_sat_ghz;
    const double sech = 1.0 / std::cosh(u);
    return sech * sech * m.gain * sigmoid((r_net_ghz - m.r_thr_ghz) / m.beta_ghz);
}

double merger_rate(double t_dead_ps, const std::vector<double>& rates_ghz) {
    double total = 0.0;
    for (double r : rates_ghz) {
        if (r < 0.0) throw std::invalid_argument("merger_rate: negative rate");
        total += r;
    }
    return total / (1.0 + total * t_dead_ps / kGhzPerInversePs);
}

double merger_rate_derivative(double t_dead_ps, double total_rate_ghz) {
    const double d = 1.0 + total_rate_ghz * t_dead_ps / kGhzPerInversePs;
    return 1.0 / (d * d);
}

RateVector propagate_rates(const NetworkSpec& spec,
                           const std::map<std::string, ActivationModel>& models) {
    std::map<std::string, const NodeDecl*> by_name;
    std::map<std::string, int> incoming;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& node : spec.nodes) {
        by_name[node.name] = &node;
        incoming[node.name] = 0;
    }
    for (const auto& edge : spec.edges) {
        adj[edge.from].push_back(edge.to);
        incoming[edge.to]++;
    }
    std::deque<std::string> ready;
    for (const auto& [name, deg] : incoming) {
        if (deg == 0) ready.push_back(name);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        order.push_back(ready.front());
        ready.pop_front();
        for (const auto& next : adj[order.back()]) {
            if (--incoming[next] == 0) ready.push_back(next);
        }
    }
    if (order.size() != spec.nodes.size()) {
        throw std::invalid_argument("propagate_rates: spec is cyclic");
    }

    // Accumulated input rates per node: exc and inh (inh only for neurons).
    std::map<std::string, double> exc_in, inh_in;
    RateVector rates;
    for (const auto& name : order) {
        const NodeDecl& node = *by_name.at(name);
        double out = 0.0;
        switch (node.kind) {
            case NodeKind::Source:
                out = node.params.at("rate");
                break;
            case NodeKind::Synapse:
                out = exc_in[name] * pass_probability(synapse_params_from_node(node));
                break;
            case NodeKind::Merger:
                out = merger_rate(merger_params_from_node(node).t_dead_ps, {exc_in[name]});
                break;
            case NodeKind::Neuron: {
                ActivationModel m;
                auto it = models.find(name);
                if (it != models.end()) m = it->second;
                out = activation(m, exc_in[name] - inh_in[name]);
                break;
            }
            case NodeKind::Splitter:
            case NodeKind::Probe:
                out = exc_in[name];
                break;
        }
        rates[name] = out;
        for (const auto& edge : spec.edges) {
            if (edge.from != name) continue;
            if (edge.to_port == InputPort::Inh) {
                inh_in[edge.to] += out;
            } else {
                exc_in[edge.to] += out;
            }
        }
    }
    return rates;
}

std::vector<std::pair<double, double>> characterize_neuron(const NeuronParams& p,
                                                           const std::vector<double>& grid_ghz,
                                                           const EngineConfig& cfg) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(grid_ghz.size());
    for (double r_in : grid_ghz) {
        if (r_in < 0.0) throw std::invalid_argument("characterize_neuron: negative grid rate");
        NetworkSpec spec;
        spec.seed = cfg.seed;
        spec.duration_ps = cfg.duration_ps;
        NodeDecl src{"stim", NodeKind::Source, {{"rate", r_in}}, 0};
        NodeDecl neuron{"dut",
                        NodeKind::Neuron,
                        {{"theta", p.theta},
                         {"tau_leak", p.tau_leak_ps},
                         {"t_ref", p.t_ref_ps},
                         {"clamp_floor", p.clamp_floor}},
                        0};
        NodeDecl probe{"out", NodeKind::Probe, {}, 0};
        spec.nodes = {src, neuron, probe};
        spec.edges = {{"stim", -1, "dut", InputPort::Exc, 0}, {"dut", -1, "out", InputPort::Default, 0}};
        const SimResult result = simulate(spec, cfg);
        samples.emplace_back(r_in, result.probe_rates_ghz.at("out"));
    }
    return samples;
}

ActivationFit fit_activation(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 8) {
        throw std::invalid_argument("fit_activation: need at least 8 samples");
    }
    double max_out = 0.0;
    for (const auto& [r_in, r_out] : samples) max_out = std::max(max_out, r_out);
    if (!(max_out > 0.0)) {
        throw std::invalid_argument("fit_activation: degenerate samples (all zero)");
    }

    // Parameters in log space for r_sat/gain/beta to keep them positive.
    // Initial threshold guess: largest input that still produces < 2% of peak.
    double thr0 = samples.front().first;
    for (const auto& [r_in, r_out] : samples) {
        if (r_out < 0.02 * max_out) thr0 = std::max(thr0, r_in);
    }
    Eigen::Vector4d theta(std::log(1.05 * max_out), thr0, std::log(1.0), std::log(2.0));

    auto unpack = [](const Eigen::Vector4d& t) {
        ActivationModel m;
        m.r_sat_ghz = std::exp(t[0]);
        m.r_thr_ghz = t[1];
        m.gain = std::exp(t[2]);
        m.beta_ghz = std::exp(t[3]);
        return m;
    };
    auto residuals = [&](const Eigen::Vector4d& t) {
        const ActivationModel m = unpack(t);
        Eigen::VectorXd r(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = activation(m, samples[i].first) - samples[i].second;
        }
        return r;
    };

    Eigen::VectorXd res = residuals(theta);
    double cost = res.squaredNorm();
    double lambda = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd jac(samples.size(), 4);
        for (int j = 0; j < 4; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(theta[j]));
            Eigen::Vector4d tp = theta, tm = theta;
            tp[j] += h;
            tm[j] -= h;
            jac.col(j) = (residuals(tp) - residuals(tm)) / (2.0 * h);
        }
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d jtr = jac.transpose() * res;
        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::Matrix4d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::Vector4d step = damped.ldlt().solve(jtr);
            const Eigen::Vector4d candidate = theta - step;
            const Eigen::VectorXd cand_res = residuals(candidate);
            const double cand_cost = cand_res.squaredNorm();
            if (cand_cost < cost) {
                theta = candidate;
                res = cand_res;
                const bool converged = cost - cand_cost < 1e-12 * (1.0 + cost);
                cost = cand_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (converged) iter = 200;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }

    ActivationFit fit;
    fit.model = unpack(theta);
    fit.rms_ghz = std::sqrt(cost / static_cast<double>(samples.size()));
    return fit;
}

std::string activation_model_to_text(const ActivationModel& m) {
    std::ostringstream out;
    out.precision(17);
    out << "r_sat=" << m.r_sat_ghz << "\n"
        << "r_thr=" << m.r_thr_ghz << "\n"
        << "gain=" << m.gain << "\n"
        << "beta=" << m.beta_ghz << "\n";
    return out.str();
}

ActivationModel activation_model_from_text(const std::string& text) {
    ActivationModel m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const double value = std::stod(line.substr(eq + 1));
        if (key == "r_sat") {
            m.r_sat_ghz = value;
        } else if (key == "r_thr") {
            m.r_thr_ghz = value;
        } else if (key == "gain") {
            m.gain = value;
        } else if (key == "beta") {
            m.beta_ghz = value;
        } else {
            throw std::invalid_argument("activation_model_from_text: unknown key '" + key + "'");
        }
    }
    return m;
}

std::string samples_to_csv(const std::vector<std::pair<double, double>>& samples) {
    std::ostringstream out;
    out.precision(17);
    out << "r_in_ghz,r_out_ghz\n";
    for (const auto& [r_in, r_out] : samples) out << r_in << "," << r_out << "\n";
    return out.str();
}

}  // namespace sfq
