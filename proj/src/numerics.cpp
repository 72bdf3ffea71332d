#include "pnes/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pnes::numerics {

LogFactorialTable::LogFactorialTable(std::size_t max_index) : values_(max_index + 1)
{
    // running sum of log k keeps neighbouring entries consistent to an ulp
    CompensatedSum<long double> acc;
    values_[0] = 0.0;
    for (std::size_t k = 1; k <= max_index; ++k) {
        acc.add(std::log(static_cast<long double>(k)));
        values_[k] = static_cast<double>(acc.value());
    }
}

double LogFactorialTable::operator()(std::size_t k) const
{
    if (k >= values_.size())
        throw std::out_of_range("log-factorial index " + std::to_string(k) + " exceeds table size " +
                                std::to_string(values_.size() - 1));
    return values_[k];
}

const LogFactorialTable& log_factorials()
{
    static const LogFactorialTable table;
    return table;
}

double log_binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        throw std::invalid_argument("log_binomial: k=" + std::to_string(k) + " > n=" + std::to_string(n));
    const auto& lf = log_factorials();
    if (n > lf.max_index())
        throw std::out_of_range("log_binomial: n=" + std::to_string(n) + " exceeds table size");
    if (k == 0 || k == n)
        return 0.0;
    return lf(n) - lf(k) - lf(n - k);
}

double hyp2f1_terminating(int a, int b, double c, double z)
{
    if (a > 0 || b > 0)
        throw std::invalid_argument("hyp2f1_terminating: a and b must be nonpositive integers");
    const int terms = std::min(-a, -b);
    CompensatedSum<long double> sum;
    sum.add(1.0L);
    long double term = 1.0L;
    for (int k = 0; k < terms; ++k) {
        const long double ck = static_cast<long double>(c) + k;
        if (ck <= 0.0 && ck == std::floor(ck))
            throw std::domain_error("hyp2f1_terminating: c=" + std::to_string(c) +
                                    " hits a nonpositive integer before the series terminates");
        term *= (static_cast<long double>(a + k) * (b + k)) / (ck * (k + 1)) * z;
        sum.add(term);
    }
    return static_cast<double>(sum.value());
}

double bessel_i(int order, double arg)
{
    if (order != 0 && order != 1)
        throw std::invalid_argument("bessel_i: only orders 0 and 1 are supported");
    if (!(arg >= 0.0))
        throw std::domain_error("bessel_i: negative argument");
    if (arg > bessel_arg_limit)
        throw std::overflow_error("bessel_i: argument " + std::to_string(arg) + " above overflow guard");

    if (arg == 0.0)
        return order == 0 ? 1.0 : 0.0;

    // sum_k (x/2)^(2k+v) / (k! (k+v)!)
    const double half = 0.5 * arg;
    const double q = half * half;
    double term = (order == 0) ? 1.0 : half;
    double sum = term;
    for (int k = 1;; ++k) {
        term *= q / (static_cast<double>(k) * (k + order));
        sum += term;
        if (term < sum * 1e-17)
            break;
    }
    return sum;
}

}  // namespace pnes::numerics
