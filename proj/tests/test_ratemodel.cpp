#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sfq/ratemodel.hpp"

using namespace sfq;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

TEST_CASE("activation shape") {
    const ActivationModel m;
    CHECK(activation(m, -20.0) < 1e-3 * m.r_sat_ghz);
    CHECK(activation(m, 1e6) == doctest::Approx(m.r_sat_ghz));
    double prev = -1.0;
    for (double r = -50.0; r <= 200.0; r += 0.5) {
        const double a = activation(m, r);
        CHECK(a >= prev - 1e-12);
        CHECK(a >= 0.0);
        CHECK(a <= m.r_sat_ghz);
        prev = a;
    }
}

TEST_CASE("activation derivative matches finite differences") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        ActivationModel m;
        m.r_sat_ghz = uniform(rng, 20.0, 200.0);
        m.r_thr_ghz = uniform(rng, -5.0, 15.0);
        m.gain = uniform(rng, 0.3, 3.0);
        m.beta_ghz = uniform(rng, 0.5, 5.0);
        const double r = uniform(rng, -10.0, 60.0);
        const double h = 1e-5 * std::max(1.0, std::abs(r));
        const double fd = (activation(m, r + h) - activation(m, r - h)) / (2.0 * h);
        const double an = activation_derivative(m, r);
        CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
    // The nominal check point: threshold + 5 GHz.
    const ActivationModel m;
    const double r = m.r_thr_ghz + 5.0;
    const double h = 1e-4;
    const double fd = (activation(m, r + h) - activation(m, r - h)) / (2.0 * h);
    CHECK(activation_derivative(m, r) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("merger_rate dead-time model") {
    CHECK(merger_rate(30.0, {30.0, 30.0}) == doctest::Approx(60.0 / 2.8));
    CHECK(merger_rate(30.0, {0.001}) == doctest::Approx(0.001).epsilon(1e-4));
    CHECK(merger_rate(30.0, {1e9}) == doctest::Approx(1000.0 / 30.0).epsilon(1e-4));
    for (double r = 0.0; r < 100.0; r += 1.0) {
        CHECK(merger_rate(30.0, {r}) <= 1000.0 / 30.0);
    }
    CHECK_THROWS_AS(merger_rate(30.0, {-1.0}), std::invalid_argument);

    // Derivative against finite differences.
    for (double r : {1.0, 10.0, 40.0, 90.0}) {
        const double h = 1e-6;
        const double fd = (merger_rate(30.0, {r + h}) - merger_rate(30.0, {r - h})) / (2.0 * h);
        CHECK(merger_rate_derivative(30.0, r) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("propagate_rates single devices") {
    SUBCASE("synapse multiplies by pass probability") {
        const ParseResult r = parse_netlist(
            "node source a rate=10GHz\nnode synapse s weight=0.5\nnode probe p\n"
            "edge a s\nedge s p\n");
        REQUIRE(r.ok());
        const RateVector rates = propagate_rates(r.spec, {});
        CHECK(rates.at("p") == doctest::Approx(5.0).epsilon(1e-6));
    }
    SUBCASE("merger applies the smooth dead-time model") {
        const ParseResult r = parse_netlist(
            "node source a rate=30GHz\nnode source b rate=30GHz\nnode merger m\nnode probe p\n"
            "edge a m\nedge b m\nedge m p\n");
        REQUIRE(r.ok());
        CHECK(propagate_rates(r.spec, {}).at("p") == doctest::Approx(60.0 / 2.8));
    }
    SUBCASE("zero input gives zero everywhere") {
        const ParseResult r = parse_netlist(
            "node source a rate=0GHz\nnode synapse s weight=0.9\n"
            "node neuron n theta=2 tau_leak=500ps t_ref=30ps\nnode probe p\n"
            "edge a s\nedge s n.exc\nedge n p\n");
        REQUIRE(r.ok());
        std::map<std::string, ActivationModel> models;
        models["n"] = ActivationModel{33.3, 14.4, 1.0, 2.0};
        CHECK(propagate_rates(r.spec, models).at("p") < 0.05);
    }
    SUBCASE("cycle is rejected") {
        const ParseResult r = parse_netlist(
            "node synapse a weight=0.5\nnode synapse b weight=0.5\nedge a b\nedge b a\n");
        REQUIRE(r.ok());
        CHECK_THROWS_AS(propagate_rates(r.spec, {}), std::invalid_argument);
    }
}

TEST_CASE("characterize_neuron measures the activation curve") {
    EngineConfig cfg;
    cfg.duration_ps = 10000.0;
    cfg.seed = 3;
    const NeuronParams p;  // theta 2, tau 500 ps, t_ref 30 ps
    std::vector<double> grid;
    for (int k = 0; k <= 19; ++k) grid.push_back(66.6 * k / 19.0);
    const auto samples = characterize_neuron(p, grid, cfg);
    REQUIRE(samples.size() == grid.size());
    CHECK(samples.front().second == 0.0);
    for (std::size_t k = 1; k < samples.size(); ++k) {
        CHECK(samples[k].second >= samples[k - 1].second - 0.35);  // one-pulse quantization
    }
    // Saturation within 5% of 1/t_ref.
    CHECK(std::abs(samples.back().second - 1000.0 / 30.0) < 0.05 * 1000.0 / 30.0);
}

TEST_CASE("fit_activation recovers synthetic parameters") {
    const ActivationModel truth{40.0, 12.0, 0.8, 3.0};
    std::vector<std::pair<double, double>> samples;
    for (int k = 0; k <= 40; ++k) {
        const double r = 80.0 * k / 40.0;
        samples.emplace_back(r, activation(truth, r));
    }
    const ActivationFit fit = fit_activation(samples);
    CHECK(fit.rms_ghz < 1e-4 * truth.r_sat_ghz);
    CHECK(fit.model.r_sat_ghz == doctest::Approx(truth.r_sat_ghz).epsilon(0.02));
    CHECK(fit.model.r_thr_ghz == doctest::Approx(truth.r_thr_ghz).epsilon(0.02));
    CHECK(fit.model.gain == doctest::Approx(truth.gain).epsilon(0.02));
    CHECK(fit.model.beta_ghz == doctest::Approx(truth.beta_ghz).epsilon(0.02));
}

TEST_CASE("fit_activation on measured data stays within tolerance") {
    EngineConfig cfg;
    cfg.duration_ps = 10000.0;
    cfg.seed = 3;
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(66.6 * k / 40.0);
    const auto samples = characterize_neuron(NeuronParams{}, grid, cfg);
    const ActivationFit fit = fit_activation(samples);
    CHECK(fit.rms_ghz <= 0.05 * fit.model.r_sat_ghz);
}

TEST_CASE("fit_activation rejects degenerate input") {
    std::vector<std::pair<double, double>> few{{0, 0}, {1, 1}, {2, 2}};
    CHECK_THROWS_AS(fit_activation(few), std::invalid_argument);
    std::vector<std::pair<double, double>> zeros;
    for (int k = 0; k < 10; ++k) zeros.emplace_back(k, 0.0);
    CHECK_THROWS_AS(fit_activation(zeros), std::invalid_argument);
}

TEST_CASE("model text round trip") {
    const ActivationModel m{42.5, 7.25, 1.5, 0.75};
    const ActivationModel back = activation_model_from_text(activation_model_to_text(m));
    CHECK(back.r_sat_ghz == m.r_sat_ghz);
    CHECK(back.r_thr_ghz == m.r_thr_ghz);
    CHECK(back.gain == m.gain);
    CHECK(back.beta_ghz == m.beta_ghz);
}
