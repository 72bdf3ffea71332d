#pragma once

// Capacity sweeps over signal energy or detector noise, plus CSV/JSON output.

#include "pnes/detector.hpp"
#include "pnes/states.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnes {

inline constexpr const char* tool_version = "1.0.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { SignalMean, NoiseMean };
enum class OutputFormat { CSV, JSON };

struct SweepConfig {
    std::vector<Family> families{Family::TMC, Family::TWB};
    SweepAxis axis = SweepAxis::SignalMean;
    std::vector<double> axis_grid;
    std::vector<double> etas;
    std::vector<NoiseStatistics> noise_statistics{NoiseStatistics::Poisson, NoiseStatistics::Thermal};
    double fixed_noise_mean = 0.2;   ///< used when sweeping the signal mean
    double fixed_signal_mean = 5.0;  ///< used when sweeping the noise mean
    double tol = 1e-10;
    std::optional<std::size_t> threshold;  ///< empty: optimize over T
    OutputFormat format = OutputFormat::CSV;
    unsigned jobs = 1;
};

/// Signal mean over [0.25, 10] (40 log-spaced points), eta in {0.5, 0.7, 0.9, 1}, N = 0.2.
SweepConfig energy_sweep_defaults();
/// Noise mean over [0, 2] (41 points), eta in {0.5, 0.7, 0.9}, signal mean 5.
SweepConfig noise_sweep_defaults();

std::vector<double> log_spaced(double lo, double hi, std::size_t points);
std::vector<double> linear_spaced(double lo, double hi, std::size_t points);

/// Throws ConfigError with a message naming the offending field.
void validate_config(const SweepConfig& config);

struct SweepRow {
    Family family = Family::TWB;
    double signal_mean = 0.0;
    double eta = 0.0;
    double noise_mean = 0.0;
    NoiseStatistics noise_statistics = NoiseStatistics::Poisson;
    double capacity_bits = 0.0;
    std::size_t optimal_threshold = 0;
    double tail_mass = 0.0;
};

/// Rows ordered by family, noise statistics, eta, then the swept axis.
/// Points sharing a detector are evaluated with one kernel; detector groups
/// run on up to config.jobs threads and the result does not depend on it.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// run_sweep with a ConfigError unless the axis is SignalMean / NoiseMean.
std::vector<SweepRow> run_sweep_energy(const SweepConfig& config);
std::vector<SweepRow> run_sweep_noise(const SweepConfig& config);

inline constexpr const char* csv_header = "family,signal_mean,eta,noise_mean,noise_stat,capacity_bits,optimal_T,tail_mass";

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows, const SweepConfig& config);

}  // namespace pnes
