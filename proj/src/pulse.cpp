#include "sfq/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sfq {

bool is_strictly_increasing(const PulseTrain& train) {
    for (std::size_t i = 1; i < train.size(); ++i) {
        if (!(train[i] > train[i - 1])) return false;
    }
    return true;
}

PulseTrain regular_train(double rate_ghz, double duration_ps, double phase_ps) {
    if (rate_ghz < 0.0) throw std::invalid_argument("regular_train: negative rate");
    if (!(duration_ps > 0.0)) throw std::invalid_argument("regular_train: non-positive duration");
    PulseTrain train;
    if (rate_ghz == 0.0) return train;
    const double period = kGhzPerInversePs / rate_ghz;
    double phase = std::fmod(phase_ps, period);
    if (phase < 0.0) phase += period;
    train.reserve(static_cast<std::size_t>(duration_ps / period) + 1);
    for (std::size_t k = 0;; ++k) {
        const double t = phase + static_cast<double>(k) * period;
        if (t >= duration_ps) break;
        train.push_back(t);
    }
    return train;
}

PulseTrain poisson_train(double rate_ghz, double duration_ps, std::uint64_t seed) {
    if (rate_ghz < 0.0) throw std::invalid_argument("poisson_train: negative rate");
    if (!(duration_ps > 0.0)) throw std::invalid_argument("poisson_train: non-positive duration");
    PulseTrain train;
    if (rate_ghz == 0.0) return train;
    std::mt19937_64 rng(seed);
    const double mean_gap_ps = kGhzPerInversePs / rate_ghz;
    // Inverse-CDF sampling; std::exponential_distribution is implementation
    // defined and would break cross-toolchain reproducibility.
    auto gap = [&] {
        double g = 0.0;
        while (g <= 0.0) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            g = -std::log1p(-u) * mean_gap_ps;
        }
        return g;
    };
    double t = gap();
    while (t < duration_ps) {
        train.push_back(t);
        t += gap();
    }
    return train;
}

RateMeasurement measure_rate(const PulseTrain& train, double start_ps, double end_ps) {
    if (!(end_ps > start_ps)) throw std::invalid_argument("measure_rate: degenerate window");
    auto lo = std::lower_bound(train.begin(), train.end(), start_ps);
    auto hi = std::lower_bound(train.begin(), train.end(), end_ps);
    RateMeasurement m;
    m.count = static_cast<std::size_t>(hi - lo);
    m.window_start_ps = start_ps;
    m.window_end_ps = end_ps;
    m.rate_ghz = static_cast<double>(m.count) / (end_ps - start_ps) * kGhzPerInversePs;
    return m;
}

std::string train_to_csv(const PulseTrain& train) {
    std::ostringstream out;
    out << "t_ps\n";
    out.precision(17);
    for (double t : train) out << t << "\n";
    return out.str();
}

PulseTrain train_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    PulseTrain train;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        train.push_back(std::stod(line));
    }
    if (!is_strictly_increasing(train)) {
        throw std::invalid_argument("train_from_csv: timestamps not strictly increasing");
    }
    return train;
}

}  // namespace sfq
