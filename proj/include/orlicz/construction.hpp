#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "orlicz/dual.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/piecewise_affine.hpp"
#include "orlicz/profile.hpp"
#include "orlicz/weights.hpp"

namespace orlicz {

// M*^{-1} as a piecewise-affine function from the weights: knot at t = l/n of
// value
//   { ((1/n) sum_{i<=l} a_i)^2 + (l/n) * ((1/n) sum_{i>l} a_i^2) }^{1/2},
// l = 1..n, plus the origin. The empty tail at l = n contributes zero. The
// knots are concave; the flag is verified before returning.
inline PiecewiseAffine knots_from_weights(const WeightSequence& a) {
    const std::size_t n = a.size();
    std::vector<double> t(n + 1, 0.0), v(n + 1, 0.0);
    double prefix = 0.0;
    std::vector<double> tail_sq(n + 1, 0.0); // tail_sq[l] = sum_{i>l} a_i^2
    for (std::size_t l = n; l-- > 0;)
        tail_sq[l] = tail_sq[l + 1] + a[l] * a[l];
    const double nd = static_cast<double>(n);
    for (std::size_t l = 1; l <= n; ++l) {
        prefix += a[l - 1];
        const double mean_prefix = prefix / nd;
        const double frac = static_cast<double>(l) / nd;
        t[l] = frac;
        v[l] = std::sqrt(mean_prefix * mean_prefix + frac * (tail_sq[l] / nd));
    }
    PiecewiseAffine knots(std::move(t), std::move(v), /*concave=*/true);
    if (!knots.check_concave(1e-9))
        throw Error("knots_from_weights: concavity check failed");
    return knots;
}

// The dual M* from the knots of M*^{-1}: the inverse of a monotone
// piecewise-affine function is piecewise affine with the coordinates swapped,
// extended past the last knot by its final slope.
inline DualFunction orlicz_from_knots(const PiecewiseAffine& inv_knots) {
    return dual_from_knots(inv_knots.inverted());
}

// N*^{-1} from the n^2 pairwise products a_i * b_k: sort them nonincreasing
// into t(1) >= t(2) >= ..., then knot l/n^2 carries value (1/n^2) *
// sum_{j<=l} t(j).
inline PiecewiseAffine product_knots(const WeightSequence& a,
                                     const WeightSequence& b) {
    if (a.size() != b.size())
        throw LengthMismatch("product_knots: weight sequences differ in length");
    const std::size_t n = a.size();
    std::vector<double> products;
    products.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) products.push_back(a[i] * b[k]);
    std::sort(products.begin(), products.end(), std::greater<>());
    const double n2 = static_cast<double>(n * n);
    std::vector<double> t(n * n + 1, 0.0), v(n * n + 1, 0.0);
    double prefix = 0.0;
    for (std::size_t l = 1; l <= n * n; ++l) {
        prefix += products[l - 1];
        t[l] = static_cast<double>(l) / n2;
        v[l] = prefix / n2;
    }
    return PiecewiseAffine(std::move(t), std::move(v), /*concave=*/true);
}

// Weights a_l = n * (F(l/n) - F((l-1)/n)) from a strictly convex, strictly
// 2-concave M with M*(1) = 1, where F is the cumulative density of the
// profile H = (M*^{-1})^2. The sum telescopes to n * sqrt(H(1)) = n.
inline WeightSequence weights_from_orlicz(const OrliczFunction& m, int n,
                                          double tol = 1e-9) {
    if (n < 1) throw Error("weights_from_orlicz: n must be >= 1");

    // Strict convexity and strict 2-concavity on probe grids.
    if (m.kind() == OrliczKind::piecewise_affine_dual)
        throw NotStrictlyConvex("weights_from_orlicz: piecewise-affine M is not strictly convex");
    detail::require_strictly_increasing_derivative(m, 4.0);
    const auto grid = detail::probe_grid(4.0);
    const auto concavity = two_concavity_check(m, grid, 0.0);
    if (!concavity.two_concave || concavity.min_gap < 1e-10)
        throw NotTwoConcave("weights_from_orlicz: M(sqrt(t)) is not strictly concave");

    // Normalization M*(1) = 1. The dual domain extends slightly past 1 so
    // finite-difference probes near t = 1 stay in range.
    const DualFunction dual = conjugate_dual(m, 1.01, std::min(tol, 1e-9));
    if (std::abs(dual(1.0) - 1.0) > 1e-8)
        throw NotNormalized("weights_from_orlicz: M*(1) != 1; normalize first");

    const ConcaveProfile hp = profile_from_dual(dual);
    const double nd = static_cast<double>(n);
    std::vector<double> cumulative(static_cast<std::size_t>(n) + 1, 0.0);
    for (int l = 1; l <= n; ++l)
        cumulative[static_cast<std::size_t>(l)] = cumulative_f(hp, l / nd, tol);
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int l = 1; l <= n; ++l)
        a[static_cast<std::size_t>(l - 1)] =
            nd * (cumulative[static_cast<std::size_t>(l)] -
                  cumulative[static_cast<std::size_t>(l - 1)]);
    WeightSequence weights(std::move(a));

    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i];
    const double expected = nd * std::sqrt(hp.value(1.0));
    if (std::abs(total - expected) > 1e-8 * std::max(1.0, expected))
        throw Error("weights_from_orlicz: weight sum drifted from n*sqrt(H(1))");
    return weights;
}

} // namespace orlicz
