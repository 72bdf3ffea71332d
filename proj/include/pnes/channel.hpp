#pragma once

// Binary channel built from a photon-number entangled state measured by two
// identical noisy counters, with threshold decoding: count <= T -> 0, count > T -> 1.

#include "pnes/detector.hpp"
#include "pnes/states.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace pnes {

/// P(a, b) = sum_n w_n K(a|n) K(b|n): counts a and b registered on the two modes.
struct JointCountDistribution {
    std::size_t size = 0;  ///< counts 0..size-1 on each side
    std::vector<double> p;  ///< size x size, row-major
    double tail_mass = 0.0;  ///< state tail plus mass lost to kernel column tails

    double operator()(std::size_t a, std::size_t b) const { return p[a * size + b]; }
};

struct ConfusionMatrix {
    double p00 = 0.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double p11 = 0.0;
    std::size_t threshold = 0;

    double total() const noexcept { return p00 + p01 + p10 + p11; }
};

struct CapacityResult {
    double capacity = 0.0;  ///< bits
    std::size_t optimal_threshold = 0;
    std::vector<std::pair<std::size_t, double>> mutual_information_curve;
    double tail_mass = 0.0;
};

/// Throws std::invalid_argument if the kernel has fewer columns than the state's cutoff.
JointCountDistribution joint_distribution(const PnesState& state, const CountKernel& kernel);

/// Strict threshold partition. Mass outside the truncated matrix is assigned to p11.
ConfusionMatrix confusion_matrix(const JointCountDistribution& joint, std::size_t threshold);

/// I2 in bits, with 0 log 0 = 0.
double mutual_information(const ConfusionMatrix& cm);

/// Confusion matrices for T = 0..t_max, by running block sums.
std::vector<ConfusionMatrix> confusion_sweep(const JointCountDistribution& joint, std::size_t t_max);

/// Exhaustive threshold search over T = 0..T_hi, where T_hi is the first count
/// at which a single detector's cumulative marginal exceeds 1 - tol. Ties go
/// to the smallest T.
CapacityResult capacity(const PnesState& state, const CountKernel& kernel, double tol = 1e-10);

}  // namespace pnes
