#pragma once

// Per-mode photon-number distributions of the two photon-number entangled
// state families. Both are Schmidt-diagonal in the Fock basis, so the joint
// two-mode state is fully described by one vector of weights |psi_n|^2.

#include <cstddef>
#include <string_view>
#include <vector>

namespace pnes {

enum class Family {
    TWB,  ///< twin beam, weights (1 - x^2) x^(2n)
    TMC,  ///< two-mode coherently correlated, weights lambda^(2n) / (n!^2 I0(2 lambda))
};

std::string_view to_string(Family f);
/// Accepts "twb" / "tmc" (case-insensitive). Throws std::invalid_argument.
Family parse_family(std::string_view text);

/// Truncated probability vector over Fock numbers. The mass beyond the
/// truncation is tracked in tail_mass and never folded back into probs.
struct PhotonNumberDistribution {
    std::vector<double> probs;
    double tail_mass = 0.0;

    std::size_t n_max() const noexcept { return probs.empty() ? 0 : probs.size() - 1; }
};

struct PnesState {
    Family family = Family::TWB;
    double parameter = 0.0;  ///< x for TWB, lambda for TMC
    PhotonNumberDistribution weights;

    std::size_t n_max() const noexcept { return weights.n_max(); }
};

inline constexpr double default_truncation_tol = 1e-10;
inline constexpr std::size_t max_fock_cutoff = 4096;

/// Builds the state with the smallest cutoff whose tail mass is below tol.
/// Throws std::invalid_argument for parameters outside the family's domain and
/// std::runtime_error if the cutoff would exceed max_fock_cutoff.
PnesState build_state(Family family, double parameter, double tol = default_truncation_tol);

double mean_photon_number(const PnesState& state);

/// Mean photon number from the closed forms: x^2/(1-x^2) and lambda I1(2 lambda)/I0(2 lambda).
double analytic_mean(Family family, double parameter);

/// Inverse of analytic_mean. Closed form for TWB, bracketed bisection for TMC.
double parameter_from_mean(Family family, double target_mean);

/// Variance-to-mean ratio of the truncated weights. Throws std::domain_error for the vacuum.
double fano_factor(const PnesState& state);

}  // namespace pnes
