#include "pnes/detector.hpp"

#include "pnes/numerics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pnes {

using numerics::CompensatedSum;

std::string_view to_string(NoiseStatistics s)
{
    return s == NoiseStatistics::Poisson ? "poisson" : "thermal";
}

NoiseStatistics parse_noise_statistics(std::string_view text)
{
    std::string lower;
    for (char c : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "poisson")
        return NoiseStatistics::Poisson;
    if (lower == "thermal")
        return NoiseStatistics::Thermal;
    throw std::invalid_argument("unknown noise statistics '" + std::string(text) + "' (expected poisson or thermal)");
}

double NoiseModel::probability(std::size_t p) const
{
    if (mean == 0.0)
        return p == 0 ? 1.0 : 0.0;
    const double dp = static_cast<double>(p);
    if (statistics == NoiseStatistics::Poisson)
        return std::exp(-mean + dp * std::log(mean) - std::lgamma(dp + 1.0));
    return std::exp(dp * std::log(mean / (mean + 1.0)) - std::log1p(mean));
}

namespace {

template <typename Real>
Real lfact(std::size_t k)
{
    return std::lgamma(static_cast<Real>(k) + Real(1));
}

// A^{n1 n2}_{k1 k2} = sqrt((k1+k2)! (n1+n2-k1-k2)! / (n1! n2!)) (-1)^k2
//                     C(n1,k1) C(n2,k2) sin^(n1-k1+k2) cos^(n2+k1-k2),  eta = cos^2
template <typename Real>
Real amplitude(std::size_t n1, std::size_t n2, std::size_t k1, std::size_t k2, Real eta, AmplitudeSign sign)
{
    const std::size_t sin_power = n1 - k1 + k2;
    const std::size_t cos_power = n2 + k1 - k2;
    const Real sin2 = Real(1) - eta;
    if ((sin_power > 0 && sin2 <= 0) || (cos_power > 0 && eta <= 0))
        return Real(0);

    const std::size_t out1 = k1 + k2;
    const std::size_t out2 = n1 + n2 - out1;
    Real log_mag = Real(0.5) * (lfact<Real>(out1) + lfact<Real>(out2) - lfact<Real>(n1) - lfact<Real>(n2));
    log_mag += lfact<Real>(n1) - lfact<Real>(k1) - lfact<Real>(n1 - k1);
    log_mag += lfact<Real>(n2) - lfact<Real>(k2) - lfact<Real>(n2 - k2);
    if (sin_power > 0)
        log_mag += Real(0.5) * static_cast<Real>(sin_power) * std::log(sin2);
    if (cos_power > 0)
        log_mag += Real(0.5) * static_cast<Real>(cos_power) * std::log(eta);

    const bool negative = sign == AmplitudeSign::physical && (k2 % 2 == 1);
    const Real mag = std::exp(log_mag);
    return negative ? -mag : mag;
}

void check_eta(double eta)
{
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("detector efficiency eta must lie in [0, 1]");
}

// Output amplitudes <j, N-j| U |n, p> for every input with n + p = N, built
// level by level. With R the co-isometry R(v (x) e_i) = a_i^dag v / sqrt(N),
//   U_N = R_out (U_{N-1} (x) u) R_in^dag,
// where u maps a_signal^dag -> cos b1^dag + sin b2^dag and
// a_noise^dag -> -sin b1^dag + cos b2^dag. Both R maps have unit norm, so
// rounding errors grow at most linearly in N. Only the band n <= n_max,
// p <= p_max is kept; it is closed under the recursion.
class BeamSplitterLevels {
public:
    BeamSplitterLevels(double eta, std::size_t n_max, std::size_t p_max)
        : cos_(std::sqrt(eta)), sin_(std::sqrt(1.0 - eta)), n_max_(n_max), p_max_(p_max)
    {
        // level 0: vacuum in, vacuum out
        current_.assign(1, std::vector<double>{1.0});
    }

    std::size_t level() const noexcept { return level_; }
    std::size_t max_level() const noexcept { return n_max_ + p_max_; }

    /// Noise photon numbers p with (N - p, p) inside the band at the current level N.
    std::size_t p_lo() const noexcept { return level_ > n_max_ ? level_ - n_max_ : 0; }
    std::size_t p_hi() const noexcept { return std::min(level_, p_max_); }

    /// Amplitudes over j = 0..N for input (N - p, p).
    const std::vector<double>& column(std::size_t p) const { return current_[p - p_lo()]; }

    void advance()
    {
        const std::size_t prev_lo = p_lo();
        const std::size_t prev_hi = p_hi();
        ++level_;
        const std::size_t level = level_;
        const double inv_level = 1.0 / static_cast<double>(level);
        std::vector<std::vector<double>> next;
        next.reserve(p_hi() - p_lo() + 1);
        for (std::size_t p = p_lo(); p <= p_hi(); ++p) {
            const std::size_t n = level - p;
            std::vector<double> out(level + 1, 0.0);
            if (n > 0 && p >= prev_lo && p <= prev_hi)
                raise(current_[p - prev_lo], std::sqrt(static_cast<double>(n)) * inv_level, cos_, sin_, out);
            if (p > 0 && p - 1 >= prev_lo && p - 1 <= prev_hi)
                raise(current_[p - 1 - prev_lo], std::sqrt(static_cast<double>(p)) * inv_level, -sin_, cos_, out);
            next.push_back(std::move(out));
        }
        current_.swap(next);
    }

private:
    // out += weight * (u b1^dag + v b2^dag) prev, prev on level - 1
    static void raise(const std::vector<double>& prev, double weight, double u, double v, std::vector<double>& out)
    {
        const std::size_t m = prev.size() - 1;
        for (std::size_t j = 0; j <= m; ++j) {
            const double a = weight * prev[j];
            out[j + 1] += u * std::sqrt(static_cast<double>(j + 1)) * a;
            out[j] += v * std::sqrt(static_cast<double>(m + 1 - j)) * a;
        }
    }

    double cos_;
    double sin_;
    std::size_t n_max_;
    std::size_t p_max_;
    std::size_t level_ = 0;
    std::vector<std::vector<double>> current_;  // indexed by p - p_lo()
};

}  // namespace

double transfer_amplitude(std::size_t n1, std::size_t n2, std::size_t k1, std::size_t k2, double eta)
{
    if (k1 > n1 || k2 > n2)
        throw std::invalid_argument("transfer_amplitude: requires k1 <= n1 and k2 <= n2");
    check_eta(eta);
    return amplitude<double>(n1, n2, k1, k2, eta, AmplitudeSign::physical);
}

double count_prob_oracle(std::size_t n, std::size_t p, std::size_t s, double eta, AmplitudeSign sign)
{
    check_eta(eta);
    if (s > n + p)
        return 0.0;
    CompensatedSum<long double> sum;
    const std::size_t k_lo = s > p ? s - p : 0;
    const std::size_t k_hi = std::min(s, n);
    for (std::size_t k = k_lo; k <= k_hi; ++k)
        sum.add(amplitude<long double>(n, p, k, s - k, static_cast<long double>(eta), sign));
    const long double a = sum.value();
    return static_cast<double>(a * a);
}

double count_prob_closed(std::size_t n, std::size_t p, std::size_t s, double eta)
{
    if (!(eta > 0.0 && eta < 1.0))
        throw std::domain_error("count_prob_closed: closed form is singular at eta = 0 and eta = 1");
    if (s > n + p)
        return 0.0;
    if (p < s)
        return count_prob_oracle(n, p, s, eta);

    // ((1-eta)/eta)^s (1-eta)^n eta^p C(n+p-s, p-s) C(p, s) 2F1(-n, -s; 1+p-s; -eta/(1-eta))^2
    const double log_loss = std::log1p(-eta);
    const double log_eta = std::log(eta);
    const double log_prefactor = static_cast<double>(s) * (log_loss - log_eta) + static_cast<double>(n) * log_loss +
                                 static_cast<double>(p) * log_eta + numerics::log_binomial(n + p - s, p - s) +
                                 numerics::log_binomial(p, s);
    const double f = numerics::hyp2f1_terminating(-static_cast<int>(n), -static_cast<int>(s),
                                                  1.0 + static_cast<double>(p) - static_cast<double>(s),
                                                  -eta / (1.0 - eta));
    return std::exp(log_prefactor) * f * f;
}

std::vector<double> count_distribution(std::size_t n, std::size_t p, double eta)
{
    check_eta(eta);
    BeamSplitterLevels levels(eta, n, p);
    while (levels.level() < n + p)
        levels.advance();
    std::vector<double> probs;
    probs.reserve(n + p + 1);
    for (double a : levels.column(p))
        probs.push_back(a * a);
    return probs;
}

CountKernel build_kernel(const DetectorModel& detector, std::size_t n_max, double tol)
{
    check_eta(detector.eta);
    const double noise_mean = detector.noise.mean;
    if (!(noise_mean >= 0.0) || !std::isfinite(noise_mean))
        throw std::invalid_argument("noise mean photon number must be finite and nonnegative");
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("kernel tolerance must lie in (0, 1)");
    if (n_max > max_noise_cutoff)
        throw std::invalid_argument("kernel n_max exceeds the Fock cutoff cap");

    CountKernel kernel;
    kernel.detector = detector;
    kernel.tol = tol;
    kernel.n_max = n_max;

    const double eta = detector.eta;
    if (eta == 1.0) {
        // Noise leaves through the unmonitored port.
        kernel.p_max = 0;
        kernel.s_max = n_max;
        kernel.values.assign(kernel.rows() * kernel.cols(), 0.0);
        for (std::size_t n = 0; n <= n_max; ++n)
            kernel.values[n * kernel.cols() + n] = 1.0;
        kernel.column_tail.assign(kernel.cols(), 0.0);
        return kernel;
    }

    std::vector<double> nu;
    CompensatedSum<double> cumulative;
    for (std::size_t p = 0;; ++p) {
        if (p > max_noise_cutoff)
            throw std::runtime_error("noise distribution did not reach tolerance within the cutoff cap (N=" +
                                     std::to_string(noise_mean) + ")");
        nu.push_back(detector.noise.probability(p));
        cumulative.add(nu.back());
        if (cumulative.value() >= 1.0 - tol / 10.0)
            break;
    }
    kernel.p_max = nu.size() - 1;
    kernel.s_max = n_max + kernel.p_max;

    CompensatedSum<double> tail;
    for (std::size_t p = kernel.p_max + 1;; ++p) {
        const double term = detector.noise.probability(p);
        tail.add(term);
        if (static_cast<double>(p) > noise_mean && (term == 0.0 || term < 1e-18 * tail.value()))
            break;
    }
    kernel.noise_tail = tail.value();
    kernel.column_tail.assign(kernel.cols(), kernel.noise_tail);
    kernel.values.assign(kernel.rows() * kernel.cols(), 0.0);

    const std::size_t cols = kernel.cols();
    if (eta == 0.0) {
        for (std::size_t s = 0; s <= kernel.p_max; ++s)
            for (std::size_t n = 0; n <= n_max; ++n)
                kernel.values[s * cols + n] = nu[s];
        return kernel;
    }

    // Each column n receives its noise terms in increasing p, so the
    // summation order is fixed.
    BeamSplitterLevels levels(eta, n_max, kernel.p_max);
    for (;;) {
        const std::size_t level = levels.level();
        for (std::size_t p = levels.p_lo(); p <= levels.p_hi(); ++p) {
            if (nu[p] == 0.0)
                continue;
            const std::size_t n = level - p;
            const auto& amp = levels.column(p);
            for (std::size_t s = 0; s <= level; ++s)
                kernel.values[s * cols + n] += nu[p] * amp[s] * amp[s];
        }
        if (level == levels.max_level())
            break;
        levels.advance();
    }
    return kernel;
}

void write_kernel(std::ostream& out, const CountKernel& kernel)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "# count kernel K(s|n): row = counts s, column = signal photons n\n";
    auto param = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return std::string(buf);
    };
    out << "# eta=" << param(kernel.detector.eta) << " noise_stat=" << to_string(kernel.detector.noise.statistics)
        << " noise_mean=" << param(kernel.detector.noise.mean) << " tol=" << param(kernel.tol)
        << " n_max=" << kernel.n_max << " p_max=" << kernel.p_max << " s_max=" << kernel.s_max << "\n";
    out << "s";
    for (std::size_t n = 0; n <= kernel.n_max; ++n)
        out << ",n" << n;
    out << "\n";
    for (std::size_t s = 0; s <= kernel.s_max; ++s) {
        out << s;
        for (std::size_t n = 0; n <= kernel.n_max; ++n)
            out << ',' << num(kernel(s, n));
        out << "\n";
    }
    out << "# column_tail";
    for (double t : kernel.column_tail)
        out << ',' << num(t);
    out << "\n";
}

}  // namespace pnes
