#include "pnes/states.hpp"

#include "pnes/numerics.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pnes {

using numerics::CompensatedSum;

std::string_view to_string(Family f)
{
    return f == Family::TWB ? "twb" : "tmc";
}

Family parse_family(std::string_view text)
{
    std::string lower;
    for (char c : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "twb")
        return Family::TWB;
    if (lower == "tmc")
        return Family::TMC;
    throw std::invalid_argument("unknown state family '" + std::string(text) + "' (expected twb or tmc)");
}

namespace {

void check_tol(double tol)
{
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("truncation tolerance must lie in (0, 1)");
}

PhotonNumberDistribution twin_beam_weights(double x, double tol)
{
    PhotonNumberDistribution d;
    if (x == 0.0) {
        d.probs = {1.0};
        return d;
    }
    const double log_x2 = 2.0 * std::log(x);
    const double log_norm = std::log1p(-x * x);
    for (std::size_t n = 0;; ++n) {
        if (n > max_fock_cutoff)
            throw std::runtime_error("TWB truncation exceeds the Fock cutoff cap for x=" + std::to_string(x));
        d.probs.push_back(std::exp(log_norm + static_cast<double>(n) * log_x2));
        // sum_{m>n} (1-x^2) x^(2m) = x^(2(n+1))
        d.tail_mass = std::exp(static_cast<double>(n + 1) * log_x2);
        if (d.tail_mass < tol)
            return d;
    }
}

PhotonNumberDistribution coherently_correlated_weights(double lambda, double tol)
{
    PhotonNumberDistribution d;
    if (lambda == 0.0) {
        d.probs = {1.0};
        return d;
    }
    // Generate weights by the ratio recurrence w_n / w_{n-1} = lambda^2 / n^2
    // until the remaining terms are negligible, then pick the cutoff from the
    // suffix sums.
    const double log_lambda2 = 2.0 * std::log(lambda);
    double log_w = -std::log(numerics::bessel_i(0, 2.0 * lambda));
    std::vector<double> w;
    for (std::size_t n = 0;; ++n) {
        if (n > 0)
            log_w += log_lambda2 - 2.0 * std::log(static_cast<double>(n));
        w.push_back(std::exp(log_w));
        if (static_cast<double>(n) > lambda && w.back() < 1e-22)
            break;
        if (n > 4 * max_fock_cutoff)
            throw std::runtime_error("TMC weights do not decay for lambda=" + std::to_string(lambda));
    }
    std::vector<double> suffix(w.size() + 1, 0.0);
    for (std::size_t i = w.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] + w[i];
    std::size_t cut = 0;
    while (suffix[cut + 1] >= tol)
        ++cut;
    if (cut > max_fock_cutoff)
        throw std::runtime_error("TMC truncation exceeds the Fock cutoff cap for lambda=" + std::to_string(lambda));
    d.probs.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(cut + 1));
    d.tail_mass = suffix[cut + 1];
    return d;
}

double tmc_mean(double lambda)
{
    if (lambda == 0.0)
        return 0.0;
    return lambda * numerics::bessel_i(1, 2.0 * lambda) / numerics::bessel_i(0, 2.0 * lambda);
}

}  // namespace

PnesState build_state(Family family, double parameter, double tol)
{
    check_tol(tol);
    if (!(parameter >= 0.0))
        throw std::invalid_argument("state parameter must be nonnegative");
    PnesState state;
    state.family = family;
    state.parameter = parameter;
    if (family == Family::TWB) {
        if (parameter >= 1.0)
            throw std::invalid_argument("TWB parameter x must be < 1 (state is unnormalizable otherwise)");
        state.weights = twin_beam_weights(parameter, tol);
    } else {
        state.weights = coherently_correlated_weights(parameter, tol);
    }
    return state;
}

double mean_photon_number(const PnesState& state)
{
    CompensatedSum<double> sum;
    const auto& p = state.weights.probs;
    for (std::size_t n = 1; n < p.size(); ++n)
        sum.add(static_cast<double>(n) * p[n]);
    return sum.value();
}

double analytic_mean(Family family, double parameter)
{
    if (family == Family::TWB) {
        const double x2 = parameter * parameter;
        return x2 / (1.0 - x2);
    }
    return tmc_mean(parameter);
}

double parameter_from_mean(Family family, double target_mean)
{
    if (!(target_mean >= 0.0))
        throw std::invalid_argument("target mean photon number must be nonnegative");
    if (target_mean == 0.0)
        return 0.0;
    if (family == Family::TWB)
        return std::sqrt(target_mean / (1.0 + target_mean));

    // lambda I1(2 lambda)/I0(2 lambda) is increasing, ~lambda^2 near 0 and ~lambda - 1/4 for large lambda.
    double lo = 0.0;
    double hi = std::max(1.0, target_mean + 1.0);
    while (tmc_mean(hi) < target_mean)
        hi *= 2.0;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f = tmc_mean(mid) - target_mean;
        if (std::abs(f) < 1e-13 * std::max(1.0, target_mean) || hi - lo < 4e-16 * hi)
            break;
        (f < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double fano_factor(const PnesState& state)
{
    CompensatedSum<double> m1, m2;
    const auto& p = state.weights.probs;
    for (std::size_t n = 1; n < p.size(); ++n) {
        const double dn = static_cast<double>(n);
        m1.add(dn * p[n]);
        m2.add(dn * dn * p[n]);
    }
    const double mean = m1.value();
    if (mean <= 0.0)
        throw std::domain_error("Fano factor is undefined for a zero-mean state");
    return (m2.value() - mean * mean) / mean;
}

}  // namespace pnes
