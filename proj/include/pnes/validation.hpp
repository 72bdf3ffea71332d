#pragma once

// Self-check suite run by `pnes validate`: the closed-form and level-recursion count
// probabilities against the amplitude oracle, beam-splitter unitarity, the
// Heaviside support, and the limiting kernels.

#include "pnes/detector.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pnes {

struct ValidationOptions {
    std::vector<double> etas{0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
    std::size_t max_fock = 12;       ///< n, p, s range of the equivalence grid
    std::size_t max_unitarity = 10;  ///< n1, n2 range of the unitarity check
    AmplitudeSign oracle_sign = AmplitudeSign::physical;
};

struct ValidationCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed() const;
};

/// Cells whose probability is below this are compared as zeros: relative
/// error is undefined there, so both routes must simply be this small.
inline constexpr double negligible_probability = 1e-24;

/// Relative deviation with the zero-cell rule above.
double relative_deviation(double value, double reference);

ValidationReport run_validation(const ValidationOptions& options = {});

void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace pnes
