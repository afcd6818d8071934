#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "orlicz/construction.hpp"
#include "orlicz/dual.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/piecewise_affine.hpp"
#include "orlicz/weights.hpp"

namespace orlicz {

enum class AllocationMethod { greedy, exhaustive };

namespace detail {

// Shared evaluation so greedy and exhaustive produce bit-identical values
// for the same allocation: sum_i B(k_i) * |x_i| with B the prefix sums of b.
inline double allocation_value(std::span<const double> x_abs,
                               std::span<const double> prefix,
                               std::span<const int> k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x_abs.size(); ++i)
        total += prefix[static_cast<std::size_t>(k[i])] * x_abs[i];
    return total;
}

} // namespace detail

// max over integer allocations k_i >= 0, sum k_i = s, of
// sum_i B(k_i) * |x_i| with B(k) = sum_{j<=k} b_j. Greedy assignment of one
// unit at a time to the best marginal gain b_{k_i+1} * |x_i| is optimal
// because B is concave (b nonincreasing, enforced by the WeightSequence
// type); the exhaustive method enumerates all compositions and serves as the
// oracle at small sizes.
inline double b_norm(std::span<const double> x, const WeightSequence& b, int s,
                     AllocationMethod method = AllocationMethod::greedy) {
    if (s < 1 || b.size() != static_cast<std::size_t>(s))
        throw LengthMismatch("b_norm: b must have length s");
    const std::size_t n = x.size();
    if (n == 0 || n > static_cast<std::size_t>(s))
        throw LengthMismatch("b_norm: need 1 <= len(x) <= s");

    std::vector<double> x_abs(n);
    for (std::size_t i = 0; i < n; ++i) x_abs[i] = std::abs(x[i]);
    std::vector<double> prefix(static_cast<std::size_t>(s) + 1, 0.0);
    for (int j = 0; j < s; ++j)
        prefix[static_cast<std::size_t>(j) + 1] =
            prefix[static_cast<std::size_t>(j)] + b[static_cast<std::size_t>(j)];

    if (method == AllocationMethod::greedy) {
        std::vector<int> k(n, 0);
        for (int unit = 0; unit < s; ++unit) {
            std::size_t best_i = 0;
            double best_gain = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (k[i] >= s) continue;
                const double gain = b[static_cast<std::size_t>(k[i])] * x_abs[i];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_i = i;
                }
            }
            ++k[best_i];
        }
        return detail::allocation_value(x_abs, prefix, k);
    }

    // Exhaustive: enumerate compositions of s into n nonnegative parts.
    double guard = 1.0;
    for (std::size_t i = 1; i < n; ++i) guard *= (s + i) / static_cast<double>(i);
    if (guard > 5e6)
        throw TooLargeForExact("b_norm: too many compositions to enumerate");
    std::vector<int> k(n, 0);
    double best = -1.0;
    const std::size_t last = n - 1;
    std::function<void(std::size_t, int)> recurse = [&](std::size_t i, int left) {
        if (i == last) {
            k[i] = left;
            best = std::max(best, detail::allocation_value(x_abs, prefix, k));
            return;
        }
        for (int take = 0; take <= left; ++take) {
            k[i] = take;
            recurse(i + 1, left - take);
        }
    };
    recurse(0, s);
    return best;
}

// The Orlicz function induced by b: M* is the piecewise-affine dual with
// M*(B(l)) = l/s for l = 1..s, i.e. M*^{-1} has knots (l/s, B(l)).
inline DualFunction dual_from_prefix_weights(const WeightSequence& b) {
    const std::size_t s = b.size();
    std::vector<double> t(s + 1, 0.0), v(s + 1, 0.0);
    double prefix = 0.0;
    for (std::size_t l = 1; l <= s; ++l) {
        prefix += b[l - 1];
        t[l] = static_cast<double>(l) / static_cast<double>(s);
        v[l] = prefix;
    }
    return orlicz_from_knots(PiecewiseAffine(std::move(t), std::move(v)));
}

struct BNormBracketReport {
    double norm_b = 0.0;
    double norm_orlicz = 0.0;
    bool pass = false;
};

// Two-sided comparison ||x||_b <= ||x||_M <= 2*||x||_b for the induced M,
// with tolerance for the norm solver.
inline BNormBracketReport b_norm_orlicz_bracket(std::span<const double> x,
                                                const WeightSequence& b, int s,
                                                const DualFunction& m_from_b,
                                                double tol = 1e-9) {
    BNormBracketReport report;
    report.norm_b = b_norm(x, b, s, AllocationMethod::greedy);
    report.norm_orlicz = orlicz_norm(x, m_from_b);
    report.pass = report.norm_b <= report.norm_orlicz + tol &&
                  report.norm_orlicz <= 2.0 * report.norm_b + tol;
    return report;
}

} // namespace orlicz
