#include <doctest.h>

#include <stdexcept>

#include "sfq/engine.hpp"
#include "sfq/rng.hpp"

using namespace sfq;

namespace {

NetworkSpec parse_ok(const std::string& text) {
    const ParseResult r = parse_netlist(text);
    REQUIRE(r.ok());
    REQUIRE_FALSE(has_errors(validate(r.spec)));
    return r.spec;
}

EngineConfig config(double duration_ps = 10000.0, std::uint64_t seed = 42) {
    EngineConfig cfg;
    cfg.duration_ps = duration_ps;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("source to probe passthrough") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=33.3GHz\nnode probe p\nedge a p\n");
    const SimResult result = simulate(spec, config());
    CHECK(result.probe_rates_ghz.at("p") == doctest::Approx(33.3).epsilon(0.01));
    CHECK(result.probe_trains.at("p") == regular_train(33.3, 10000.0));
}

TEST_CASE("single-synapse spec equals synapse_gate") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=50GHz\nnode synapse s weight=0.5\nnode probe p\n"
        "edge a s\nedge s p\n");
    const EngineConfig cfg = config();
    const SimResult result = simulate(spec, cfg);

    SynapseParams params = synapse_params_from_node(*spec.find_node("s"));
    const PulseTrain expected = synapse_gate(params, regular_train(50.0, cfg.duration_ps),
                                             node_stream_seed(cfg.seed, "s"));
    CHECK(result.probe_trains.at("p") == expected);
}

TEST_CASE("single-neuron spec equals neuron_process") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=40GHz\n"
        "node neuron n theta=3 tau_leak=120ps t_ref=25ps\n"
        "node probe p\nedge a n.exc\nedge n p\n");
    const EngineConfig cfg = config();
    const SimResult result = simulate(spec, cfg);

    const NeuronParams params = neuron_params_from_node(*spec.find_node("n"));
    const NeuronTrace trace = neuron_process(params, regular_train(40.0, cfg.duration_ps), {});
    CHECK(result.probe_trains.at("p") == trace.output);
}

TEST_CASE("single-merger spec equals merger_process") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=30GHz\nnode source b rate=30GHz phase=16.67ps\n"
        "node merger m\nnode probe p\n"
        "edge a m\nedge b m\nedge m p\n");
    const EngineConfig cfg = config();
    const SimResult result = simulate(spec, cfg);

    const PulseTrain expected =
        merger_process(MergerParams{}, {regular_train(30.0, cfg.duration_ps),
                                        regular_train(30.0, cfg.duration_ps, 16.67)});
    // The engine probe only keeps events inside the run window.
    PulseTrain clipped;
    for (double t : expected) {
        if (t < cfg.duration_ps) clipped.push_back(t);
    }
    CHECK(result.probe_trains.at("p") == clipped);
}

TEST_CASE("splitter branches delay by one stage") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=10GHz\nnode splitter sp delay=5ps fanout=2\n"
        "node probe p0\nnode probe p1\n"
        "edge a sp\nedge sp.0 p0\nedge sp.1 p1\n");
    const SimResult result = simulate(spec, config(1000.0));
    const PulseTrain expected = splitter_process(SplitterParams{}, regular_train(10.0, 1000.0))[0];
    PulseTrain clipped;
    for (double t : expected) {
        if (t < 1000.0) clipped.push_back(t);
    }
    CHECK(result.probe_trains.at("p0") == clipped);
    CHECK(result.probe_trains.at("p1") == clipped);
}

TEST_CASE("simulation is deterministic") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=25GHz poisson=1\n"
        "node synapse s weight=0.7\n"
        "node neuron n theta=2 tau_leak=500ps t_ref=30ps\n"
        "node probe p\nedge a s\nedge s n.exc\nedge n p\n");
    const SimResult r1 = simulate(spec, config());
    const SimResult r2 = simulate(spec, config());
    CHECK(r1.probe_trains.at("p") == r2.probe_trains.at("p"));
    CHECK(r1.switch_count == r2.switch_count);

    // A different seed produces a different thinning.
    const SimResult r3 = simulate(spec, config(10000.0, 43));
    CHECK(r1.probe_trains.at("p") != r3.probe_trains.at("p"));
}

TEST_CASE("per-node streams are independent of unrelated nodes") {
    const char* base =
        "node source a rate=50GHz\nnode synapse s weight=0.5\nnode probe p\n"
        "edge a s\nedge s p\n";
    const char* extended =
        "node source a rate=50GHz\nnode synapse s weight=0.5\nnode probe p\n"
        "node source b rate=50GHz\nnode synapse s2 weight=0.5\nnode probe q\n"
        "edge a s\nedge s p\nedge b s2\nedge s2 q\n";
    const SimResult r1 = simulate(parse_ok(base), config());
    const SimResult r2 = simulate(parse_ok(extended), config());
    CHECK(r1.probe_trains.at("p") == r2.probe_trains.at("p"));
}

TEST_CASE("causality: probe events never precede their source pulses") {
    const NetworkSpec spec = parse_ok(
        "node source a rate=10GHz phase=3ps\nnode splitter sp\n"
        "node probe p0\nnode probe p1\nedge a sp\nedge sp.0 p0\nedge sp.1 p1\n");
    const SimResult result = simulate(spec, config(1000.0));
    for (const auto& [name, train] : result.probe_trains) {
        for (double t : train) CHECK(t >= 3.0);
    }
}

TEST_CASE("energy accounting") {
    SUBCASE("empty run") {
        const NetworkSpec spec = parse_ok("node source a rate=0GHz\nnode probe p\nedge a p\n");
        const SimResult result = simulate(spec, config());
        CHECK(result.switch_count == 0);
        CHECK(result.energy_j == 0.0);
    }
    SUBCASE("transparent synapse: one switch per pulse") {
        const NetworkSpec spec = parse_ok(
            "node source a rate=50GHz\nnode synapse s weight=1\nnode probe p\n"
            "edge a s\nedge s p\n");
        const SimResult result = simulate(spec, config(2000.0));  // 100 pulses
        CHECK(result.node_switches.at("s") == 100);
        CHECK(result.switch_count == 100);
        CHECK(result.energy_j == 100.0 * PhysicalConstants::switch_energy_j);
        const EnergyReport report = energy_report(result);
        CHECK(report.total_switches == 100);
        std::uint64_t sum = 0;
        for (const auto& [name, n] : report.node_switches) sum += n;
        CHECK(sum == report.total_switches);
    }
    SUBCASE("neuron counts inputs plus outputs, splitter counts fanout") {
        const NetworkSpec spec = parse_ok(
            "node source a rate=10GHz\nnode splitter sp fanout=2\n"
            "node neuron n theta=1 tau_leak=infps t_ref=0ps\n"
            "node probe p0\nnode probe p1\n"
            "edge a sp\nedge sp.0 n.exc\nedge sp.1 p1\nedge n p0\n");
        const SimResult result = simulate(spec, config(1000.0));  // 10 source pulses
        CHECK(result.node_switches.at("sp") == 20);
        CHECK(result.node_switches.at("n") == 20);  // 10 in + 10 out
        CHECK(result.switch_count == 40);
    }
}

TEST_CASE("engine rejects invalid input") {
    ParseResult r = parse_netlist(
        "node source a rate=10GHz\nnode synapse s1 weight=0.5\nnode synapse s2 weight=0.5\n"
        "node probe p1\nnode probe p2\nedge a s1\nedge a s2\nedge s1 p1\nedge s2 p2\n");
    REQUIRE(r.ok());
    CHECK_THROWS_AS(simulate(r.spec, config()), std::invalid_argument);  // fan-out violation

    const NetworkSpec good = parse_ok("node source a rate=50GHz\nnode probe p\nedge a p\n");
    EngineConfig tiny = config();
    tiny.event_cap = 10;
    CHECK_THROWS_AS(simulate(good, tiny), std::runtime_error);
}
