#include "pnes/channel.hpp"

#include "pnes/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pnes {

using numerics::CompensatedSum;

JointCountDistribution joint_distribution(const PnesState& state, const CountKernel& kernel)
{
    const std::size_t n_max = state.n_max();
    if (kernel.n_max < n_max)
        throw std::invalid_argument("joint_distribution: kernel n_max " + std::to_string(kernel.n_max) +
                                    " is below the state cutoff " + std::to_string(n_max));

    // Column n of the kernel is supported on s <= n + p_max.
    const std::size_t size = std::min(kernel.s_max, n_max + kernel.p_max) + 1;
    const auto& w = state.weights.probs;

    JointCountDistribution joint;
    joint.size = size;
    joint.p.assign(size * size, 0.0);

    std::vector<double> col(size);
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (w[n] == 0.0)
            continue;
        const std::size_t top = std::min(size, n + kernel.p_max + 1);
        for (std::size_t s = 0; s < top; ++s)
            col[s] = kernel(s, n);
        for (std::size_t a = 0; a < top; ++a) {
            const double wa = w[n] * col[a];
            if (wa == 0.0)
                continue;
            double* row = &joint.p[a * size];
            for (std::size_t b = 0; b <= a; ++b)
                row[b] += wa * col[b];
        }
    }
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = a + 1; b < size; ++b)
            joint.p[a * size + b] = joint.p[b * size + a];

    // sum_n w_n (1 - (1 - t_n)^2) is lost through the column tails.
    CompensatedSum<double> tail;
    tail.add(state.weights.tail_mass);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double t = kernel.column_tail[n];
        tail.add(w[n] * t * (2.0 - t));
    }
    joint.tail_mass = tail.value();
    return joint;
}

ConfusionMatrix confusion_matrix(const JointCountDistribution& joint, std::size_t threshold)
{
    CompensatedSum<double> s00, s01, s10, s11;
    for (std::size_t a = 0; a < joint.size; ++a) {
        for (std::size_t b = 0; b < joint.size; ++b) {
            const double v = joint(a, b);
            if (a <= threshold)
                (b <= threshold ? s00 : s01).add(v);
            else
                (b <= threshold ? s10 : s11).add(v);
        }
    }
    s11.add(joint.tail_mass);
    return {s00.value(), s01.value(), s10.value(), s11.value(), threshold};
}

std::vector<ConfusionMatrix> confusion_sweep(const JointCountDistribution& joint, std::size_t t_max)
{
    const std::size_t size = joint.size;
    std::vector<double> row_marginal(size, 0.0), col_marginal(size, 0.0);
    CompensatedSum<double> total;
    for (std::size_t a = 0; a < size; ++a) {
        CompensatedSum<double> r, c;
        for (std::size_t b = 0; b < size; ++b) {
            r.add(joint(a, b));
            c.add(joint(b, a));
        }
        row_marginal[a] = r.value();
        col_marginal[a] = c.value();
        total.add(row_marginal[a]);
    }

    std::vector<ConfusionMatrix> out;
    out.reserve(t_max + 1);
    CompensatedSum<double> block, rows_below, cols_below;
    for (std::size_t t = 0; t <= t_max; ++t) {
        if (t < size) {
            // grow the lower-left block by row t and column t
            for (std::size_t b = 0; b <= t; ++b)
                block.add(joint(t, b));
            for (std::size_t a = 0; a < t; ++a)
                block.add(joint(a, t));
            rows_below.add(row_marginal[t]);
            cols_below.add(col_marginal[t]);
        }
        ConfusionMatrix cm;
        cm.threshold = t;
        cm.p00 = block.value();
        cm.p01 = rows_below.value() - cm.p00;
        cm.p10 = cols_below.value() - cm.p00;
        cm.p11 = total.value() - rows_below.value() - cols_below.value() + cm.p00 + joint.tail_mass;
        out.push_back(cm);
    }
    return out;
}

double mutual_information(const ConfusionMatrix& cm)
{
    const double p[2][2] = {{cm.p00, cm.p01}, {cm.p10, cm.p11}};
    const double q[2] = {cm.p00 + cm.p01, cm.p10 + cm.p11};
    const double r[2] = {cm.p00 + cm.p10, cm.p01 + cm.p11};
    double info = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (p[i][j] > 0.0)
                info += p[i][j] * std::log2(p[i][j] / (q[i] * r[j]));
    return std::clamp(info, 0.0, 1.0);
}

CapacityResult capacity(const PnesState& state, const CountKernel& kernel, double tol)
{
    const JointCountDistribution joint = joint_distribution(state, kernel);

    // Single-detector marginal; by symmetry either side will do.
    std::size_t t_hi = joint.size - 1;
    CompensatedSum<double> cumulative;
    for (std::size_t a = 0; a < joint.size; ++a) {
        for (std::size_t b = 0; b < joint.size; ++b)
            cumulative.add(joint(a, b));
        if (cumulative.value() > 1.0 - tol) {
            t_hi = a;
            break;
        }
    }

    CapacityResult result;
    result.tail_mass = joint.tail_mass;
    result.mutual_information_curve.reserve(t_hi + 1);
    double best = -1.0;
    for (const ConfusionMatrix& cm : confusion_sweep(joint, t_hi)) {
        const double info = mutual_information(cm);
        result.mutual_information_curve.emplace_back(cm.threshold, info);
        if (info > best) {
            best = info;
            result.optimal_threshold = cm.threshold;
        }
    }
    result.capacity = best;
    return result;
}

}  // namespace pnes
