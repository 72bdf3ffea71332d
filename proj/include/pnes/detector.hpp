#pragma once

// Noisy photodetector: an ideal photon counter behind a beam splitter of
// transmittivity eta whose second port carries a dark-count noise mode
// nu = sum_p nu_p |p><p|.
//
// Three routes to P(s counts | n signal photons, p noise photons):
//   count_prob_oracle    coherent sum of transfer-matrix amplitudes (reference)
//   count_prob_closed    terminating 2F1 closed form, cross-checked against the oracle
//   count_distribution   level-by-level beam-splitter recursion, stable at large n; used by build_kernel
// The first two lose all precision to alternating-sign cancellation once n
// reaches the hundreds, so they are only evaluated on small grids.

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace pnes {

enum class NoiseStatistics { Poisson, Thermal };

std::string_view to_string(NoiseStatistics s);
/// Accepts "poisson" / "thermal" (case-insensitive). Throws std::invalid_argument.
NoiseStatistics parse_noise_statistics(std::string_view text);

struct NoiseModel {
    NoiseStatistics statistics = NoiseStatistics::Poisson;
    double mean = 0.0;  ///< mean dark-count photon number N per slot

    /// nu_p: e^-N N^p / p! (Poisson) or N^p / (N+1)^(p+1) (thermal).
    double probability(std::size_t p) const;
};

struct DetectorModel {
    double eta = 1.0;  ///< quantum efficiency, cos^2 of the beam-splitter angle
    NoiseModel noise;
};

/// Beam-splitter Fock transfer amplitude A^{n1 n2}_{k1 k2}: k1 of the n1
/// signal photons and k2 of the n2 noise photons exit toward the counter.
/// Throws std::invalid_argument if k1 > n1 or k2 > n2.
double transfer_amplitude(std::size_t n1, std::size_t n2, std::size_t k1, std::size_t k2, double eta);

/// Sign convention of the noise-port amplitude. `dropped` removes the
/// (-1)^k2 factor and exists only so the validation harness can demonstrate
/// that it detects a corrupted amplitude.
enum class AmplitudeSign { physical, dropped };

/// P(s | n, p) as the squared coherent sum of transfer amplitudes, evaluated
/// in extended precision. Zero when s > n + p.
double count_prob_oracle(std::size_t n, std::size_t p, std::size_t s, double eta,
                         AmplitudeSign sign = AmplitudeSign::physical);

/// P(s | n, p) from the 2F1 closed form. Requires 0 < eta < 1 (throws
/// std::domain_error otherwise). Cells with p < s, where the 2F1 lower
/// parameter 1+p-s is a nonpositive integer, are delegated to the oracle.
double count_prob_closed(std::size_t n, std::size_t p, std::size_t s, double eta);

/// Full count distribution P(s | n, p) for s = 0..n+p by the photon-number level recursion.
std::vector<double> count_distribution(std::size_t n, std::size_t p, double eta);

/// K(s|n) = sum_p nu_p P(s | n, p), row index s, column index n.
struct CountKernel {
    DetectorModel detector;
    double tol = 0.0;
    std::size_t n_max = 0;
    std::size_t p_max = 0;  ///< last noise Fock number included
    std::size_t s_max = 0;  ///< n_max + p_max; exact support bound
    double noise_tail = 0.0;
    std::vector<double> values;       ///< (s_max+1) x (n_max+1), row-major
    std::vector<double> column_tail;  ///< per-n probability mass not represented in the matrix

    double operator()(std::size_t s, std::size_t n) const { return values[s * (n_max + 1) + n]; }
    std::size_t rows() const noexcept { return s_max + 1; }
    std::size_t cols() const noexcept { return n_max + 1; }
};

inline constexpr std::size_t max_noise_cutoff = 4096;

/// Builds the kernel for columns n = 0..n_max. The noise sum stops once the
/// accumulated nu_p reaches 1 - tol/10. eta = 1 and eta = 0 use the exact
/// limiting kernels. Throws std::invalid_argument for invalid detector
/// parameters and std::runtime_error if the noise cutoff cap is hit.
CountKernel build_kernel(const DetectorModel& detector, std::size_t n_max, double tol = 1e-10);

/// Delimited-text dump: '#' header lines with the detector parameters, a
/// column header, then one comma-separated row per count s, and a trailing
/// '# column_tail' line.
void write_kernel(std::ostream& out, const CountKernel& kernel);

}  // namespace pnes
