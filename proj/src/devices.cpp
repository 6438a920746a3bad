#include "sfq/devices.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sfq {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Acklam's rational approximation to the probit function, refined below with
// one Newton step against the CDF.
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r, z;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        q = p - 0.5;
        r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    z -= (normal_cdf(z) - p) / normal_pdf(z);
    return z;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double pass_probability(const SynapseParams& p) {
    if (!(p.sigma_gz_ua > 0.0)) throw std::invalid_argument("pass_probability: sigma_gz must be > 0");
    return normal_cdf((p.i_b_ua - p.i_center_ua) / p.sigma_gz_ua);
}

double bias_for_weight(const SynapseParams& p, double weight) {
    if (!(p.sigma_gz_ua > 0.0)) throw std::invalid_argument("bias_for_weight: sigma_gz must be > 0");
    if (weight < 0.0 || weight > 1.0 || std::isnan(weight)) {
        throw std::invalid_argument("bias_for_weight: weight outside [0,1]");
    }
    double z;
    if (weight <= 0.0) {
        z = -6.0;
    } else if (weight >= 1.0) {
        z = 6.0;
    } else {
        z = std::clamp(normal_quantile(weight), -6.0, 6.0);
    }
    return p.i_center_ua + z * p.sigma_gz_ua;
}

PulseTrain synapse_gate(const SynapseParams& p, const PulseTrain& input, std::uint64_t seed) {
    const double pass = pass_probability(p);
    std::mt19937_64 rng(seed);
    PulseTrain out;
    out.reserve(input.size());
    for (double t : input) {
        if (uniform01(rng) < pass) out.push_back(t);
    }
    return out;
}

bool NeuronState::on_event(double t, bool inhibitory) {
    if (std::isfinite(p_.tau_leak_ps)) {
        state_ *= std::exp(-(t - t_last_) / p_.tau_leak_ps);
    }
    t_last_ = t;
    state_ += inhibitory ? -1.0 : 1.0;
    if (state_ < p_.clamp_floor) state_ = p_.clamp_floor;
    bool fired = false;
    if (state_ >= p_.theta) {
        if (t >= last_output_ + p_.t_ref_ps) {
            fired = true;
            last_output_ = t;
        }
        // Inside the refractory window the flux still escapes: this is the
        // rate-saturation mechanism.
        state_ -= p_.theta;
        if (state_ < p_.clamp_floor) state_ = p_.clamp_floor;
    }
    return fired;
}

std::optional<double> MergerState::on_event(double t) {
    if (t == last_input_) return std::nullopt;  // coincident pulses collapse
    last_input_ = t;
    const double emit = t >= next_free_ ? t : next_free_;
    next_free_ = emit + p_.t_dead_ps;
    return emit;
}

NeuronTrace neuron_process(const NeuronParams& p, const PulseTrain& excitatory,
                           const PulseTrain& inhibitory) {
    struct Ev {
        double t;
        bool inh;
    };
    std::vector<Ev> events;
    events.reserve(excitatory.size() + inhibitory.size());
    for (double t : excitatory) events.push_back({t, false});
    for (double t : inhibitory) events.push_back({t, true});
    // Inhibitory-before-excitatory at equal timestamps.
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.inh && !b.inh;
    });

    NeuronState state(p);
    NeuronTrace trace;
    trace.samples.reserve(events.size());
    for (const Ev& ev : events) {
        if (state.on_event(ev.t, ev.inh)) trace.output.push_back(ev.t);
        trace.samples.emplace_back(ev.t, state.state());
    }
    return trace;
}

PulseTrain merger_process(const MergerParams& p, const std::vector<PulseTrain>& inputs) {
    if (inputs.empty()) throw std::invalid_argument("merger_process: need at least one input");
    PulseTrain all;
    for (const auto& train : inputs) all.insert(all.end(), train.begin(), train.end());
    std::sort(all.begin(), all.end());
    MergerState state(p);
    PulseTrain out;
    for (double t : all) {
        if (auto emit = state.on_event(t)) out.push_back(*emit);
    }
    return out;
}

std::vector<PulseTrain> splitter_process(const SplitterParams& p, const PulseTrain& input) {
    if (p.fanout < 2) throw std::invalid_argument("splitter_process: fanout must be >= 2");
    PulseTrain shifted;
    shifted.reserve(input.size());
    for (double t : input) shifted.push_back(t + p.delay_ps);
    return std::vector<PulseTrain>(static_cast<std::size_t>(p.fanout), shifted);
}

}  // namespace sfq
