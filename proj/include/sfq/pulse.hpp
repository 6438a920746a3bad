#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sfq {

// All times are picoseconds, all rates are GHz (1 GHz = 1e-3 pulses/ps).
constexpr double kGhzPerInversePs = 1e3;

// Universal signal type: strictly increasing pulse timestamps in ps.
using PulseTrain = std::vector<double>;

struct PhysicalConstants {
    static constexpr double flux_quantum_mv_ps = 2.07;   // single flux quantum area
    static constexpr double switch_energy_j = 2e-19;     // energy per junction switch
};

struct RateMeasurement {
    double rate_ghz = 0.0;
    double window_start_ps = 0.0;
    double window_end_ps = 0.0;
    std::size_t count = 0;
};

bool is_strictly_increasing(const PulseTrain& train);

// Pulses at phase + k/rate for k >= 0 inside [0, duration). Zero rate gives an
// empty train. phase is wrapped into [0, period).
PulseTrain regular_train(double rate_ghz, double duration_ps, double phase_ps = 0.0);

// Exponential inter-arrival times with mean 1/rate; reproducible per seed.
PulseTrain poisson_train(double rate_ghz, double duration_ps, std::uint64_t seed);

// Count / window length over [start, end).
RateMeasurement measure_rate(const PulseTrain& train, double start_ps, double end_ps);

// CSV, one timestamp per line, header `t_ps`.
std::string train_to_csv(const PulseTrain& train);
PulseTrain train_from_csv(const std::string& csv);

}  // namespace sfq
