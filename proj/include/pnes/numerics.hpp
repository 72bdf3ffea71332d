#pragma once

// Special functions and combinatorics shared by the state, detector and
// channel code. Everything here is a pure function over immutable tables.

#include <cstddef>
#include <span>
#include <vector>

namespace pnes::numerics {

/// Precomputed ln(k!) for k = 0..max_index.
class LogFactorialTable {
public:
    static constexpr std::size_t default_size = 4096;

    explicit LogFactorialTable(std::size_t max_index = default_size);

    double operator()(std::size_t k) const;
    std::size_t max_index() const noexcept { return values_.size() - 1; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Process-wide table of size LogFactorialTable::default_size.
const LogFactorialTable& log_factorials();

/// ln C(n, k). Throws std::invalid_argument for k > n and std::out_of_range
/// when n exceeds the table.
double log_binomial(std::size_t n, std::size_t k);

/// Terminating Gauss series 2F1(a, b; c; z) with a, b nonpositive integers.
/// Summed term by term with Neumaier compensation.
double hyp2f1_terminating(int a, int b, double c, double z);

/// Modified Bessel function of the first kind, order 0 or 1, by power series.
/// Valid for 0 <= arg <= bessel_arg_limit.
double bessel_i(int order, double arg);

inline constexpr double bessel_arg_limit = 700.0;

/// Neumaier (improved Kahan) running sum.
template <typename Real>
class CompensatedSum {
public:
    void add(Real x) noexcept
    {
        const Real t = sum_ + x;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(Real x) noexcept
    {
        add(x);
        return *this;
    }
    Real value() const noexcept { return sum_ + comp_; }

private:
    Real sum_{0};
    Real comp_{0};
};

}  // namespace pnes::numerics
