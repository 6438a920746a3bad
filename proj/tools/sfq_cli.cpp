#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sfq/pipelines.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct CommonOpts {
    std::uint64_t seed = 1;
    double duration_ps = 10000.0;
    std::string out_dir = ".";
    double rate_norm_ghz = 33.3;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--duration-ps", opts.duration_ps, "Simulation duration in ps");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--rate-norm-ghz", opts.rate_norm_ghz, "Normalization rate in GHz");
}

// I/O failures exit with code 2, domain failures with 1.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
}

void write_manifest(const std::string& subcommand, const CommonOpts& opts,
                    const nlohmann::json& params, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json manifest;
    manifest["subcommand"] = subcommand;
    manifest["version"] = kVersion;
    manifest["seed"] = opts.seed;
    manifest["duration_ps"] = opts.duration_ps;
    manifest["rate_norm_ghz"] = opts.rate_norm_ghz;
    manifest["out_dir"] = opts.out_dir;
    manifest["params"] = params;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    write_file(opts.out_dir, subcommand + "_manifest.json", manifest.dump(2) + "\n");
}

sfq::EngineConfig engine_config(const CommonOpts& opts, bool traces = false) {
    sfq::EngineConfig cfg;
    cfg.duration_ps = opts.duration_ps;
    cfg.seed = opts.seed;
    cfg.trace_states = traces;
    return cfg;
}

sfq::NetworkSpec load_netlist(const std::string& path) {
    const sfq::ParseResult parsed = sfq::parse_netlist(read_file(path));
    auto diags = parsed.diagnostics;
    const auto structural = sfq::validate(parsed.spec);
    diags.insert(diags.end(), structural.begin(), structural.end());
    for (const auto& d : diags) {
        std::cerr << (d.severity == sfq::Severity::Error ? "error" : "warning") << ": " << d.message;
        if (d.line > 0) std::cerr << " (line " << d.line << ")";
        std::cerr << "\n";
    }
    if (!parsed.ok() || sfq::has_errors(structural)) {
        throw std::runtime_error("netlist '" + path + "' failed validation");
    }
    return parsed.spec;
}

std::vector<double> neuron_grid(double max_ghz, int points) {
    std::vector<double> grid;
    for (int k = 0; k < points; ++k) {
        grid.push_back(max_ghz * static_cast<double>(k) / static_cast<double>(points - 1));
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SFQ spiking-network simulator, trainer, and netlist compiler"};
    app.require_subcommand(1);

    CommonOpts opts;

    // characterize-synapse
    auto* cs = app.add_subcommand("characterize-synapse", "Empirical pass probability vs bias");
    sfq::SynapseSweep sweep;
    sfq::SynapseParams syn;
    add_common(cs, opts);
    cs->add_option("--ib-lo-ua", sweep.i_b_lo_ua, "Sweep start");
    cs->add_option("--ib-hi-ua", sweep.i_b_hi_ua, "Sweep end");
    cs->add_option("--steps", sweep.steps, "Sweep points");
    cs->add_option("--pulses", sweep.pulses_per_point, "Input pulses per point");
    cs->add_option("--sigma-gz-ua", syn.sigma_gz_ua, "Grey zone width");
    cs->add_option("--i-center-ua", syn.i_center_ua, "Grey zone center");

    // characterize-neuron
    auto* cn = app.add_subcommand("characterize-neuron", "Measured activation curve");
    sfq::NeuronParams neuron;
    double grid_max_ghz = 66.6;
    int grid_points = 41;
    add_common(cn, opts);
    cn->add_option("--theta", neuron.theta, "Firing threshold");
    cn->add_option("--tau-leak-ps", neuron.tau_leak_ps, "Leak time constant (inf disables)");
    cn->add_option("--t-ref-ps", neuron.t_ref_ps, "Refractory period");
    cn->add_option("--clamp-floor", neuron.clamp_floor, "State floor");
    cn->add_option("--grid-max-ghz", grid_max_ghz, "Largest input rate");
    cn->add_option("--grid-points", grid_points, "Grid size");

    // fit-activation
    auto* fa = app.add_subcommand("fit-activation", "Fit activation model to a measured curve");
    std::string fit_input;
    add_common(fa, opts);
    fa->add_option("--in", fit_input, "Characterization CSV (r_in_norm,r_out_norm); measured anew when omitted");

    // train-xor
    auto* tx = app.add_subcommand("train-xor", "Train the XOR network and lower it");
    sfq::TrainConfig train_cfg;
    add_common(tx, opts);
    tx->add_option("--lr", train_cfg.learning_rate, "Learning rate");
    tx->add_option("--epochs", train_cfg.max_epochs, "Maximum epochs");
    tx->add_option("--target-loss", train_cfg.target_loss, "Early-stop loss");

    // lower
    auto* lw = app.add_subcommand("lower", "Lower a trained model file to a netlist");
    std::string model_path;
    add_common(lw, opts);
    lw->add_option("--model", model_path, "Trained model text file")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Event-driven simulation of a netlist");
    std::string netlist_path;
    std::vector<double> input_rates_norm;
    bool traces = false;
    add_common(sim, opts);
    sim->add_option("--netlist", netlist_path, "Netlist file")->required();
    sim->add_option("--input-rates-norm", input_rates_norm,
                    "Normalized rate overrides for in0, in1, ...");
    sim->add_flag("--traces", traces, "Write per-neuron state traces");

    // phase-diagram
    auto* pd = app.add_subcommand("phase-diagram", "Classification grid over input rates");
    std::string pd_netlist;
    int pd_grid = 21;
    add_common(pd, opts);
    pd->add_option("--netlist", pd_netlist, "Netlist file")->required();
    pd->add_option("--grid", pd_grid, "Grid size per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cs->parsed()) {
            const std::string csv = sfq::characterize_synapse_csv(syn, sweep, opts.seed);
            write_file(opts.out_dir, "synapse_characterization.csv", csv);
            write_manifest("characterize-synapse", opts,
                           {{"ib_lo_ua", sweep.i_b_lo_ua},
                            {"ib_hi_ua", sweep.i_b_hi_ua},
                            {"steps", sweep.steps},
                            {"pulses", sweep.pulses_per_point},
                            {"sigma_gz_ua", syn.sigma_gz_ua},
                            {"i_center_ua", syn.i_center_ua}},
                           {}, {"synapse_characterization.csv"});
        } else if (cn->parsed()) {
            const std::string csv = sfq::characterize_neuron_csv(
                neuron, neuron_grid(grid_max_ghz, grid_points), engine_config(opts),
                opts.rate_norm_ghz);
            write_file(opts.out_dir, "neuron_characterization.csv", csv);
            write_manifest("characterize-neuron", opts,
                           {{"theta", neuron.theta},
                            {"tau_leak_ps", neuron.tau_leak_ps},
                            {"t_ref_ps", neuron.t_ref_ps},
                            {"clamp_floor", neuron.clamp_floor},
                            {"grid_max_ghz", grid_max_ghz},
                            {"grid_points", grid_points}},
                           {}, {"neuron_characterization.csv"});
        } else if (fa->parsed()) {
            std::vector<std::pair<double, double>> samples;
            if (fit_input.empty()) {
                samples = sfq::characterize_neuron(sfq::NeuronParams{},
                                                   neuron_grid(66.6, 41), engine_config(opts));
            } else {
                std::istringstream in(read_file(fit_input));
                std::string line;
                std::getline(in, line);  // header
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto comma = line.find(',');
                    samples.emplace_back(std::stod(line.substr(0, comma)) * opts.rate_norm_ghz,
                                         std::stod(line.substr(comma + 1)) * opts.rate_norm_ghz);
                }
            }
            const sfq::ActivationFit fit = sfq::fit_activation(samples);
            write_file(opts.out_dir, "activation_model.txt", sfq::activation_model_to_text(fit.model));
            std::cout << "rms_ghz=" << fit.rms_ghz << "\n";
            write_manifest("fit-activation", opts, {{"input", fit_input}, {"rms_ghz", fit.rms_ghz}},
                           fit_input.empty() ? std::vector<std::string>{}
                                             : std::vector<std::string>{fit_input},
                           {"activation_model.txt"});
        } else if (tx->parsed()) {
            train_cfg.seed = opts.seed;
            const sfq::XorArtifacts artifacts = sfq::train_xor_pipeline(opts.seed, train_cfg);
            write_file(opts.out_dir, "xor_model.txt", artifacts.model_text);
            write_file(opts.out_dir, "xor_netlist.txt", artifacts.netlist_text);
            std::ostringstream curve;
            curve.precision(17);
            curve << "epoch,loss\n";
            for (std::size_t e = 0; e < artifacts.training.loss_curve.size(); ++e) {
                curve << e << "," << artifacts.training.loss_curve[e] << "\n";
            }
            write_file(opts.out_dir, "xor_loss_curve.csv", curve.str());
            std::cout << "final_loss=" << artifacts.training.final_loss
                      << " epochs=" << artifacts.training.epochs << "\n";
            write_manifest("train-xor", opts,
                           {{"lr", train_cfg.learning_rate},
                            {"epochs", train_cfg.max_epochs},
                            {"target_loss", train_cfg.target_loss},
                            {"final_loss", artifacts.training.final_loss}},
                           {}, {"xor_model.txt", "xor_netlist.txt", "xor_loss_curve.csv"});
            if (!(artifacts.training.final_loss < 0.01)) {
                std::cerr << "error: training did not reach loss < 0.01\n";
                return 1;
            }
        } else if (lw->parsed()) {
            const sfq::MLPSpec mlp = sfq::mlp_from_text(read_file(model_path));
            const sfq::NetworkSpec network =
                sfq::lower_to_network(mlp, sfq::xor_synapse_params(), sfq::xor_neuron_params(),
                                      sfq::xor_merger_params(), sfq::xor_splitter_params());
            write_file(opts.out_dir, "lowered_netlist.txt", sfq::serialize_netlist(network));
            write_manifest("lower", opts, {{"model", model_path}}, {model_path},
                           {"lowered_netlist.txt"});
        } else if (sim->parsed()) {
            sfq::NetworkSpec spec = load_netlist(netlist_path);
            for (std::size_t i = 0; i < input_rates_norm.size(); ++i) {
                sfq::set_input_rate(spec, i, input_rates_norm[i], opts.rate_norm_ghz);
            }
            const sfq::SimResult result = sfq::simulate(spec, engine_config(opts, traces));
            write_file(opts.out_dir, "rates.csv", sfq::probe_rates_to_csv(result));
            std::vector<std::string> outputs{"rates.csv"};
            if (traces) {
                for (const auto& [name, trace] : result.traces) {
                    std::ostringstream tcsv;
                    tcsv.precision(17);
                    tcsv << "t_ps,state\n";
                    for (const auto& [t, s] : trace.samples) tcsv << t << "," << s << "\n";
                    write_file(opts.out_dir, name + "_trace.csv", tcsv.str());
                    outputs.push_back(name + "_trace.csv");
                }
            }
            std::cout << sfq::probe_rates_to_csv(result);
            write_manifest("simulate", opts,
                           {{"netlist", netlist_path},
                            {"input_rates_norm", input_rates_norm},
                            {"traces", traces}},
                           {netlist_path}, outputs);
        } else if (pd->parsed()) {
            const sfq::NetworkSpec spec = load_netlist(pd_netlist);
            const std::string csv =
                sfq::phase_diagram_csv(spec, pd_grid, engine_config(opts), opts.rate_norm_ghz);
            write_file(opts.out_dir, "phase_diagram.csv", csv);
            write_manifest("phase-diagram", opts, {{"netlist", pd_netlist}, {"grid", pd_grid}},
                           {pd_netlist}, {"phase_diagram.csv"});
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
