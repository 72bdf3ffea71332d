#include "pnes/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace pnes {

bool ValidationReport::passed() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

double relative_deviation(double value, double reference)
{
    if (std::abs(value) < negligible_probability && std::abs(reference) < negligible_probability)
        return 0.0;
    return std::abs(value - reference) / std::max(std::abs(reference), negligible_probability);
}

namespace {

ValidationCheck make_check(std::string name, double deviation, double tolerance)
{
    return {std::move(name), deviation, tolerance, deviation <= tolerance};
}

double binomial_loss(std::size_t n, std::size_t s, double eta)
{
    if (s > n)
        return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(s + 1.0) - std::lgamma(n - s + 1.0) +
                    (s > 0 ? s * std::log(eta) : 0.0) + (n > s ? (n - s) * std::log1p(-eta) : 0.0));
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& options)
{
    ValidationReport report;
    const std::size_t grid = options.max_fock;

    double closed_dev = 0.0;
    double levels_dev = 0.0;
    double support_dev = 0.0;
    for (double eta : options.etas) {
        for (std::size_t n = 0; n <= grid; ++n) {
            for (std::size_t p = 0; p <= grid; ++p) {
                const auto levels = count_distribution(n, p, eta);
                for (std::size_t s = 0; s <= grid; ++s) {
                    const double oracle = count_prob_oracle(n, p, s, eta, options.oracle_sign);
                    if (s > n + p) {
                        support_dev = std::max({support_dev, std::abs(oracle), std::abs(count_prob_closed(n, p, s, eta))});
                        continue;
                    }
                    if (eta > 0.0 && eta < 1.0)
                        closed_dev = std::max(closed_dev, relative_deviation(count_prob_closed(n, p, s, eta), oracle));
                    levels_dev = std::max(levels_dev, relative_deviation(levels[s], oracle));
                }
            }
        }
    }
    report.checks.push_back(make_check("closed form vs amplitude oracle (relative)", closed_dev, 1e-10));
    report.checks.push_back(make_check("level recursion vs amplitude oracle (relative)", levels_dev, 1e-10));
    report.checks.push_back(make_check("zero probability outside support s <= n + p", support_dev, 0.0));

    // Output pair (s, n1 + n2 - s) collects the coherent sum over k1 + k2 = s.
    double unitarity_dev = 0.0;
    for (double eta : options.etas) {
        for (std::size_t n1 = 0; n1 <= options.max_unitarity; ++n1) {
            for (std::size_t n2 = 0; n2 <= options.max_unitarity; ++n2) {
                double norm = 0.0;
                for (std::size_t s = 0; s <= n1 + n2; ++s) {
                    const double prob = count_prob_oracle(n1, n2, s, eta, options.oracle_sign);
                    norm += prob;
                }
                unitarity_dev = std::max(unitarity_dev, std::abs(norm - 1.0));
            }
        }
    }
    report.checks.push_back(make_check("beam-splitter unitarity |sum_s P(s|n1,n2) - 1|", unitarity_dev, 1e-10));

    constexpr std::size_t kernel_n = 20;
    // as large as the sweeps need (TWB at mean 10)
    constexpr std::size_t wide_n = 300;
    double identity_dev = 0.0;
    double dark_dev = 0.0;
    double loss_dev = 0.0;
    double norm_dev = 0.0;
    for (NoiseStatistics stat : {NoiseStatistics::Poisson, NoiseStatistics::Thermal}) {
        for (double noise_mean : {0.2, 1.0, 2.0}) {
            const NoiseModel noise{stat, noise_mean};
            const CountKernel id = build_kernel({1.0, noise}, kernel_n);
            for (std::size_t s = 0; s <= id.s_max; ++s)
                for (std::size_t n = 0; n <= id.n_max; ++n)
                    identity_dev = std::max(identity_dev, std::abs(id(s, n) - (s == n ? 1.0 : 0.0)));

            const CountKernel dark = build_kernel({0.0, noise}, kernel_n);
            for (std::size_t s = 0; s <= dark.s_max; ++s)
                for (std::size_t n = 0; n <= dark.n_max; ++n)
                    dark_dev = std::max(dark_dev, std::abs(dark(s, n) - (s <= dark.p_max ? noise.probability(s) : 0.0)));

            for (double eta : options.etas) {
                const CountKernel k = build_kernel({eta, noise}, wide_n);
                for (std::size_t n = 0; n <= k.n_max; ++n) {
                    double col = 0.0;
                    for (std::size_t s = 0; s <= k.s_max; ++s)
                        col += k(s, n);
                    norm_dev = std::max(norm_dev, std::abs(col + k.column_tail[n] - 1.0));
                }
            }
        }
    }
    for (double eta : options.etas) {
        const CountKernel k = build_kernel({eta, NoiseModel{NoiseStatistics::Poisson, 0.0}}, kernel_n);
        for (std::size_t s = 0; s <= k.s_max; ++s)
            for (std::size_t n = 0; n <= k.n_max; ++n)
                loss_dev = std::max(loss_dev, std::abs(k(s, n) - binomial_loss(n, s, eta)));
    }
    report.checks.push_back(make_check("eta=1 kernel is the identity", identity_dev, 0.0));
    report.checks.push_back(make_check("eta=0 kernel columns equal the noise distribution", dark_dev, 0.0));
    report.checks.push_back(make_check("noiseless kernel equals binomial loss", loss_dev, 1e-10));
    report.checks.push_back(make_check("kernel column normalization", norm_dev, 1e-10));
    return report;
}

void print_report(std::ostream& out, const ValidationReport& report)
{
    char buf[256];
    for (const auto& c : report.checks) {
        std::snprintf(buf, sizeof buf, "[%s] %-58s max deviation %.3e (tolerance %.1e)\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.max_deviation, c.tolerance);
        out << buf;
    }
    out << (report.passed() ? "validation passed\n" : "validation FAILED\n");
}

}  // namespace pnes
