#include "sfq/trainer.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sfq {

namespace {

struct LayerCache {
    Eigen::VectorXd input;
    Eigen::VectorXd pos;
    Eigen::VectorXd neg;
    Eigen::VectorXd net;
};

double merger_m(const MergerParams& mp, double r) { return merger_rate(mp.t_dead_ps, {r}); }

Eigen::VectorXd layer_forward(const Layer& layer, const MergerParams& mp, double r_norm,
                              const Eigen::VectorXd& r, LayerCache* cache) {
    const Eigen::MatrixXd wpos = layer.weights.cwiseMax(0.0);
    const Eigen::MatrixXd wneg = (-layer.weights).cwiseMax(0.0);
    const Eigen::VectorXd pos = wpos * r + layer.biases.cwiseMax(0.0) * r_norm;
    const Eigen::VectorXd neg = wneg * r + (-layer.biases).cwiseMax(0.0) * r_norm;
    Eigen::VectorXd net(pos.size());
    for (Eigen::Index j = 0; j < pos.size(); ++j) {
        net[j] = merger_m(mp, pos[j]) - merger_m(mp, neg[j]);
    }
    Eigen::VectorXd out(net.size());
    for (Eigen::Index j = 0; j < net.size(); ++j) out[j] = activation(layer.activation, net[j]);
    if (cache) *cache = {r, pos, neg, net};
    return out;
}

// Returns the gradient w.r.t. the layer input; fills gw/gb.
Eigen::VectorXd layer_backward(const Layer& layer, const MergerParams& mp, double r_norm,
                               const LayerCache& cache, const Eigen::VectorXd& gout,
                               Eigen::MatrixXd& gw, Eigen::VectorXd& gb) {
    const Eigen::Index rows = layer.weights.rows();
    const Eigen::Index cols = layer.weights.cols();
    Eigen::VectorXd gnet(rows), mpos(rows), mneg(rows);
    for (Eigen::Index j = 0; j < rows; ++j) {
        gnet[j] = gout[j] * activation_derivative(layer.activation, cache.net[j]);
        mpos[j] = merger_rate_derivative(mp.t_dead_ps, cache.pos[j]);
        mneg[j] = merger_rate_derivative(mp.t_dead_ps, cache.neg[j]);
    }
    gw.resize(rows, cols);
    gb.resize(rows);
    Eigen::VectorXd gin = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index j = 0; j < rows; ++j) {
        for (Eigen::Index i = 0; i < cols; ++i) {
            const double sel = layer.weights(j, i) >= 0.0 ? mpos[j] : mneg[j];
            gw(j, i) = gnet[j] * sel * cache.input[i];
            gin[i] += gnet[j] * sel * layer.weights(j, i);
        }
        gb[j] = gnet[j] * (layer.biases[j] >= 0.0 ? mpos[j] : mneg[j]) * r_norm;
    }
    return gin;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

std::size_t MLPSpec::input_size() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

std::size_t MLPSpec::output_size() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weights.rows());
}

Eigen::VectorXd forward(const MLPSpec& mlp, const Eigen::VectorXd& input_ghz) {
    if (static_cast<std::size_t>(input_ghz.size()) != mlp.input_size()) {
        throw std::invalid_argument("forward: input dimension mismatch");
    }
    Eigen::VectorXd r = input_ghz;
    for (const Layer& layer : mlp.layers) {
        r = layer_forward(layer, mlp.merger, mlp.r_norm_ghz, r, nullptr);
    }
    return r;
}

std::vector<LayerGradient> gradients(const MLPSpec& mlp, const Dataset& data, double* loss_out) {
    if (data.inputs.size() != data.targets.size() || data.inputs.empty()) {
        throw std::invalid_argument("gradients: inconsistent dataset");
    }
    const double n = mlp.r_norm_ghz;
    std::vector<LayerGradient> grads(mlp.layers.size());
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        grads[l].weights = Eigen::MatrixXd::Zero(mlp.layers[l].weights.rows(),
                                                 mlp.layers[l].weights.cols());
        grads[l].biases = Eigen::VectorXd::Zero(mlp.layers[l].biases.size());
    }
    const double patterns = static_cast<double>(data.inputs.size());
    double loss = 0.0;
    for (std::size_t p = 0; p < data.inputs.size(); ++p) {
        std::vector<LayerCache> caches(mlp.layers.size());
        Eigen::VectorXd r = data.inputs[p] * n;
        for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
            r = layer_forward(mlp.layers[l], mlp.merger, n, r, &caches[l]);
        }
        const Eigen::VectorXd err = (r - data.targets[p] * n) / n;
        loss += err.squaredNorm();
        Eigen::VectorXd g = 2.0 * err / (n * patterns);
        for (std::size_t l = mlp.layers.size(); l-- > 0;) {
            Eigen::MatrixXd gw;
            Eigen::VectorXd gb;
            g = layer_backward(mlp.layers[l], mlp.merger, n, caches[l], g, gw, gb);
            if (mlp.layers[l].trainable) {
                grads[l].weights += gw;
                grads[l].biases += gb;
            }
        }
    }
    if (loss_out) *loss_out = loss / patterns;
    return grads;
}

TrainResult train(const MLPSpec& mlp, const Dataset& data, const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
    TrainResult result;
    result.mlp = mlp;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        double loss = 0.0;
        const auto grads = gradients(result.mlp, data, &loss);
        if (!std::isfinite(loss)) {
            throw std::runtime_error("train: loss diverged; try a smaller learning rate");
        }
        result.loss_curve.push_back(loss);
        result.final_loss = loss;
        result.epochs = epoch;
        if (loss < cfg.target_loss) return result;
        for (std::size_t l = 0; l < result.mlp.layers.size(); ++l) {
            Layer& layer = result.mlp.layers[l];
            if (!layer.trainable) continue;
            layer.weights = (layer.weights - cfg.learning_rate * grads[l].weights)
                                .cwiseMax(-cfg.weight_clip)
                                .cwiseMin(cfg.weight_clip);
            layer.biases = (layer.biases - cfg.learning_rate * grads[l].biases)
                               .cwiseMax(-cfg.bias_clip)
                               .cwiseMin(cfg.bias_clip);
        }
    }
    return result;
}

double golden_phase_fraction(std::size_t k) {
    const double golden = 0.6180339887498949;
    return std::fmod(static_cast<double>(k) * golden, 1.0);
}

NetworkSpec lower_to_network(const MLPSpec& mlp, const SynapseParams& dev, const NeuronParams& np,
                             const MergerParams& mp, const SplitterParams& sp) {
    for (const Layer& layer : mlp.layers) {
        if ((layer.weights.cwiseAbs().array() > 1.0).any()) {
            throw std::invalid_argument("lower_to_network: |w| > 1 is not realizable");
        }
    }
    NetworkSpec spec;
    spec.duration_ps = 10000.0;
    std::size_t phase_idx = 0;
    auto add_source = [&](const std::string& name, double rate_ghz) {
        NodeDecl src;
        src.name = name;
        src.kind = NodeKind::Source;
        src.params["rate"] = rate_ghz;
        src.params["phase"] =
            golden_phase_fraction(phase_idx++) * (kGhzPerInversePs / rate_ghz);
        spec.nodes.push_back(src);
    };

    std::vector<std::string> prev;
    for (std::size_t i = 0; i < mlp.input_size(); ++i) {
        const std::string name = "in" + std::to_string(i);
        add_source(name, mlp.r_norm_ghz);
        prev.push_back(name);
    }

    std::size_t neuron_idx = 0;
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        const Layer& layer = mlp.layers[l];
        std::vector<std::string> outputs;
        for (Eigen::Index j = 0; j < layer.weights.rows(); ++j) {
            const std::string nname = "n" + std::to_string(neuron_idx++);
            std::vector<std::string> exc_drivers, inh_drivers;
            for (Eigen::Index i = 0; i < layer.weights.cols(); ++i) {
                const double w = layer.weights(j, i);
                if (w == 0.0) continue;  // pass 0: omitted connection
                auto& drivers = w >= 0.0 ? exc_drivers : inh_drivers;
                if (!layer.trainable && w == 1.0) {
                    drivers.push_back(prev[static_cast<std::size_t>(i)]);
                    continue;
                }
                NodeDecl syn;
                syn.name = nname + "_w" + std::to_string(i);
                syn.kind = NodeKind::Synapse;
                syn.params["i_b"] = bias_for_weight(dev, std::abs(w));
                syn.params["i_c"] = dev.i_c_ua;
                syn.params["i_center"] = dev.i_center_ua;
                syn.params["sigma_gz"] = dev.sigma_gz_ua;
                spec.nodes.push_back(syn);
                spec.edges.push_back(
                    {prev[static_cast<std::size_t>(i)], -1, syn.name, InputPort::Default, 0});
                drivers.push_back(syn.name);
            }
            const double b = layer.biases[j];
            if (b != 0.0) {
                const std::string bname = "bias_" + nname;
                add_source(bname, std::abs(b) * mlp.r_norm_ghz);
                (b > 0.0 ? exc_drivers : inh_drivers).push_back(bname);
            }
            NodeDecl neuron;
            neuron.name = nname;
            neuron.kind = NodeKind::Neuron;
            neuron.params["theta"] = np.theta;
            neuron.params["tau_leak"] = np.tau_leak_ps;
            neuron.params["t_ref"] = np.t_ref_ps;
            neuron.params["clamp_floor"] = np.clamp_floor;
            spec.nodes.push_back(neuron);
            auto attach = [&](const std::vector<std::string>& drivers, InputPort port,
                              const char* suffix) {
                if (drivers.empty()) return;
                NodeDecl merger;
                merger.name = nname + suffix;
                merger.kind = NodeKind::Merger;
                merger.params["t_dead"] = mp.t_dead_ps;
                spec.nodes.push_back(merger);
                for (const auto& d : drivers) {
                    spec.edges.push_back({d, -1, merger.name, InputPort::Default, 0});
                }
                spec.edges.push_back({merger.name, -1, nname, port, 0});
            };
            attach(exc_drivers, InputPort::Exc, "_exc_m");
            attach(inh_drivers, InputPort::Inh, "_inh_m");
            outputs.push_back(nname);
        }
        prev = outputs;
    }

    for (std::size_t j = 0; j < prev.size(); ++j) {
        NodeDecl probe;
        probe.name = "out" + std::to_string(j);
        probe.kind = NodeKind::Probe;
        spec.nodes.push_back(probe);
        spec.edges.push_back({prev[j], -1, probe.name, InputPort::Default, 0});
    }

    return expand_fanout(spec, sp);
}

std::pair<MLPSpec, Dataset> build_xor(std::uint64_t seed, double low_norm, double high_norm) {
    std::mt19937_64 rng(seed);
    const ActivationModel act{150.0, 0.0, 1.0, 2.0};

    MLPSpec mlp;
    mlp.merger = MergerParams{2.0};
    mlp.r_norm_ghz = 33.3;

    Layer normalizer;
    normalizer.weights = Eigen::MatrixXd::Identity(2, 2);
    normalizer.biases = Eigen::VectorXd::Zero(2);
    normalizer.trainable = false;
    normalizer.activation = act;
    mlp.layers.push_back(normalizer);

    // Difference-detector initialization: the hidden units start as a ~ |a-b|
    // decomposition, which steers descent away from the symmetric local
    // minima of XOR and yields two disjoint high-output lobes.
    Layer hidden;
    hidden.weights.resize(2, 2);
    hidden.weights << 0.7, -0.7, -0.7, 0.7;
    hidden.biases.resize(2);
    hidden.biases << -0.3, -0.3;
    hidden.activation = act;
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) hidden.weights(j, i) += uniform(rng, -0.2, 0.2);
    }
    for (int j = 0; j < 2; ++j) hidden.biases[j] += uniform(rng, -0.1, 0.1);
    mlp.layers.push_back(hidden);

    Layer output;
    output.weights.resize(1, 2);
    output.weights << 0.7, 0.7;
    output.biases = Eigen::VectorXd::Zero(1);
    output.activation = act;
    for (int i = 0; i < 2; ++i) output.weights(0, i) += uniform(rng, -0.2, 0.2);
    output.biases[0] += uniform(rng, -0.1, 0.1);
    mlp.layers.push_back(output);

    Dataset data;
    const double lo = low_norm, hi = high_norm;
    for (const auto& [a, b, t] : std::vector<std::tuple<double, double, double>>{
             {lo, lo, 0.05}, {lo, hi, 1.25}, {hi, lo, 1.25}, {hi, hi, 0.05}}) {
        Eigen::VectorXd in(2);
        in << a, b;
        Eigen::VectorXd out(1);
        out << t;
        data.inputs.push_back(in);
        data.targets.push_back(out);
    }
    return {mlp, data};
}

std::string mlp_to_text(const MLPSpec& mlp) {
    std::ostringstream out;
    out.precision(17);
    out << "r_norm=" << mlp.r_norm_ghz << "\n";
    out << "t_dead=" << mlp.merger.t_dead_ps << "\n";
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        const Layer& layer = mlp.layers[l];
        out << "layer " << l << ": size=" << layer.weights.rows() << "x" << layer.weights.cols()
            << " trainable=" << (layer.trainable ? 1 : 0) << " r_sat=" << layer.activation.r_sat_ghz
            << " r_thr=" << layer.activation.r_thr_ghz << " gain=" << layer.activation.gain
            << " beta=" << layer.activation.beta_ghz << "\n";
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
            for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
                out << "layer " << l << ": w[" << i << "][" << j << "]=" << layer.weights(i, j)
                    << "\n";
            }
        }
        for (Eigen::Index i = 0; i < layer.biases.size(); ++i) {
            out << "layer " << l << ": bias[" << i << "]=" << layer.biases[i] << "\n";
        }
    }
    return out.str();
}

MLPSpec mlp_from_text(const std::string& text) {
    MLPSpec mlp;
    std::istringstream in(text);
    std::string line;
    auto fail = [](const std::string& l) {
        throw std::invalid_argument("mlp_from_text: malformed line '" + l + "'");
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("r_norm=", 0) == 0) {
            mlp.r_norm_ghz = std::stod(line.substr(7));
            continue;
        }
        if (line.rfind("t_dead=", 0) == 0) {
            mlp.merger.t_dead_ps = std::stod(line.substr(7));
            continue;
        }
        if (line.rfind("layer ", 0) != 0) fail(line);
        std::istringstream ls(line.substr(6));
        std::size_t l = 0;
        char colon = 0;
        ls >> l >> colon;
        if (colon != ':') fail(line);
        if (l >= mlp.layers.size()) mlp.layers.resize(l + 1);
        Layer& layer = mlp.layers[l];
        std::string item;
        while (ls >> item) {
            auto eq = item.find('=');
            if (eq == std::string::npos) fail(line);
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            if (key == "size") {
                auto x = val.find('x');
                if (x == std::string::npos) fail(line);
                layer.weights = Eigen::MatrixXd::Zero(std::stol(val.substr(0, x)),
                                                      std::stol(val.substr(x + 1)));
                layer.biases = Eigen::VectorXd::Zero(layer.weights.rows());
            } else if (key == "trainable") {
                layer.trainable = std::stoi(val) != 0;
            } else if (key == "r_sat") {
                layer.activation.r_sat_ghz = std::stod(val);
            } else if (key == "r_thr") {
                layer.activation.r_thr_ghz = std::stod(val);
            } else if (key == "gain") {
                layer.activation.gain = std::stod(val);
            } else if (key == "beta") {
                layer.activation.beta_ghz = std::stod(val);
            } else if (key.rfind("w[", 0) == 0) {
                std::size_t i = 0, j = 0;
                if (std::sscanf(key.c_str(), "w[%zu][%zu]", &i, &j) != 2) fail(line);
                layer.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::stod(val);
            } else if (key.rfind("bias[", 0) == 0) {
                std::size_t i = 0;
                if (std::sscanf(key.c_str(), "bias[%zu]", &i) != 1) fail(line);
                layer.biases(static_cast<Eigen::Index>(i)) = std::stod(val);
            } else {
                fail(line);
            }
        }
    }
    return mlp;
}

}  // namespace sfq
