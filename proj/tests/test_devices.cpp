#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "sfq/devices.hpp"

using namespace sfq;

namespace {
SynapseParams synapse_with_bias(double i_b) {
    SynapseParams p;
    p.i_b_ua = i_b;
    return p;
}
}  // namespace

TEST_CASE("pass_probability follows the grey-zone CDF") {
    CHECK(pass_probability(synapse_with_bias(100.0)) == doctest::Approx(0.5));
    CHECK(pass_probability(synapse_with_bias(115.0)) == doctest::Approx(0.8413).epsilon(1e-3));
    CHECK(pass_probability(synapse_with_bias(100.0 - 6.0 * 15.0)) < 1e-9);
    CHECK(pass_probability(synapse_with_bias(100.0 + 6.0 * 15.0)) > 1.0 - 1e-9);
    SynapseParams bad;
    bad.sigma_gz_ua = 0.0;
    CHECK_THROWS_AS(pass_probability(bad), std::invalid_argument);
}

TEST_CASE("pass_probability is monotone in bias") {
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
        const double p = pass_probability(synapse_with_bias(k));
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("bias_for_weight inverts pass_probability") {
    const SynapseParams p;
    CHECK(bias_for_weight(p, 0.5) == doctest::Approx(100.0));
    CHECK(bias_for_weight(p, 0.8413) == doctest::Approx(115.0).epsilon(1e-3));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const double w =
            0.01 + 0.98 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
        SynapseParams q = p;
        q.i_b_ua = bias_for_weight(p, w);
        CHECK(std::abs(pass_probability(q) - w) < 1e-6);
    }
    // Exact endpoints clamp to +-6 sigma.
    CHECK(bias_for_weight(p, 0.0) == doctest::Approx(100.0 - 90.0));
    CHECK(bias_for_weight(p, 1.0) == doctest::Approx(100.0 + 90.0));
    CHECK_THROWS_AS(bias_for_weight(p, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(bias_for_weight(p, 1.1), std::invalid_argument);
}

TEST_CASE("synapse_gate thins pulses") {
    const PulseTrain input = regular_train(50.0, 20000.0);  // 1000 pulses
    REQUIRE(input.size() == 1000);

    SynapseParams open = synapse_with_bias(100.0 + 6.0 * 15.0);
    CHECK(synapse_gate(open, input, 1) == input);

    SynapseParams closed = synapse_with_bias(100.0 - 6.0 * 15.0);
    CHECK(synapse_gate(closed, input, 1).empty());

    SynapseParams half = synapse_with_bias(100.0);
    const PulseTrain kept = synapse_gate(half, input, 42);
    CHECK(synapse_gate(half, input, 42) == kept);  // seeded
    CHECK(std::abs(static_cast<double>(kept.size()) - 500.0) < 47.5);
    CHECK(is_strictly_increasing(kept));
}

TEST_CASE("neuron integrate-and-fire without leak") {
    NeuronParams p;
    p.theta = 4.0;
    p.tau_leak_ps = kNoLeak;
    p.t_ref_ps = 0.0;
    PulseTrain exc;
    for (int k = 0; k < 8; ++k) exc.push_back(10.0 * (k + 1));
    const NeuronTrace trace = neuron_process(p, exc, {});
    REQUIRE(trace.output.size() == 2);
    CHECK(trace.output[0] == doctest::Approx(40.0));
    CHECK(trace.output[1] == doctest::Approx(80.0));
}

TEST_CASE("neuron emits floor(N/theta) pulses without leak or refractory") {
    for (int theta = 1; theta <= 8; ++theta) {
        for (int n = 0; n <= 50; ++n) {
            NeuronParams p;
            p.theta = theta;
            p.tau_leak_ps = kNoLeak;
            p.t_ref_ps = 0.0;
            PulseTrain exc;
            for (int k = 0; k < n; ++k) exc.push_back(k + 1.0);
            CHECK(neuron_process(p, exc, {}).output.size() ==
                  static_cast<std::size_t>(n / theta));
        }
    }
}

TEST_CASE("strong leak suppresses widely spaced pulses") {
    NeuronParams p;
    p.theta = 4.0;
    p.tau_leak_ps = 10.0;
    p.t_ref_ps = 0.0;
    PulseTrain exc;
    for (int k = 0; k < 50; ++k) exc.push_back(100.0 * (k + 1));
    CHECK(neuron_process(p, exc, {}).output.empty());
}

TEST_CASE("interleaved inhibition cancels excitation") {
    NeuronParams p;
    p.theta = 1.0;
    p.tau_leak_ps = kNoLeak;
    p.t_ref_ps = 0.0;
    p.clamp_floor = -1.0;  // at floor 0 the inhibitory pulse would clamp away
    PulseTrain exc, inh;
    for (int k = 0; k < 20; ++k) {
        inh.push_back(10.0 * k + 1.0);
        exc.push_back(10.0 * k + 2.0);
    }
    CHECK(neuron_process(p, exc, inh).output.empty());
    // Coincident timestamps: inhibitory processed first.
    CHECK(neuron_process(p, inh, inh).output.empty());
}

TEST_CASE("refractory window subtracts threshold without emitting") {
    NeuronParams p;
    p.theta = 1.0;
    p.tau_leak_ps = kNoLeak;
    p.t_ref_ps = 30.0;
    const PulseTrain exc = regular_train(100.0, 300.0, 1.0);  // 10 ps spacing
    const NeuronTrace trace = neuron_process(p, exc, {});
    for (std::size_t k = 1; k < trace.output.size(); ++k) {
        CHECK(trace.output[k] - trace.output[k - 1] >= 30.0);
    }
    // Saturation: 100 GHz in, ~1/t_ref out.
    CHECK(trace.output.size() == 10);
}

TEST_CASE("neuron state respects the clamp floor") {
    NeuronParams p;
    p.theta = 2.0;
    p.tau_leak_ps = 50.0;
    p.t_ref_ps = 0.0;
    p.clamp_floor = -1.5;
    PulseTrain inh = regular_train(40.0, 1000.0);
    PulseTrain exc = regular_train(13.0, 1000.0, 3.0);
    const NeuronTrace trace = neuron_process(p, exc, inh);
    for (const auto& [t, s] : trace.samples) CHECK(s >= p.clamp_floor - 1e-12);
}

TEST_CASE("merger dead-time gate") {
    MergerParams p;  // 30 ps
    const PulseTrain a = regular_train(10.0, 1000.0);  // 100 ps spacing
    CHECK(merger_process(p, {a}) == a);

    // Coincident pulses collapse.
    CHECK(merger_process(p, {a, a}).size() == a.size());

    // Two interleaved 30 GHz trains saturate near 1/t_dead.
    const PulseTrain x = regular_train(30.0, 10000.0);
    const PulseTrain y = regular_train(30.0, 10000.0, 16.67);
    const PulseTrain merged = merger_process(p, {x, y});
    const double rate = measure_rate(merged, 2000.0, 10000.0).rate_ghz;
    CHECK(rate > 31.0);
    CHECK(rate < 33.4);
    for (std::size_t k = 1; k < merged.size(); ++k) {
        CHECK(merged[k] - merged[k - 1] >= p.t_dead_ps);
    }
    CHECK_THROWS_AS(merger_process(p, {}), std::invalid_argument);
}

TEST_CASE("splitter shifts and replicates") {
    SplitterParams p;  // delay 5, fanout 2
    CHECK(splitter_process(p, {}).size() == 2);
    const PulseTrain in{1.0, 2.0, 3.0};
    const auto out = splitter_process(p, in);
    REQUIRE(out.size() == 2);
    for (const auto& branch : out) {
        REQUIRE(branch.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) CHECK(branch[k] == doctest::Approx(in[k] + 5.0));
    }
    SplitterParams bad;
    bad.fanout = 1;
    CHECK_THROWS_AS(splitter_process(bad, in), std::invalid_argument);
}
