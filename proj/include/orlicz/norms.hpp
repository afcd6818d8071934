#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "orlicz/dual.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/rootfind.hpp"

namespace orlicz {

namespace detail {

// Orlicz norm for piecewise-affine M*: the sup over the constraint set is a
// finite problem. Writing the norm as min over lambda > 0 of
//   h(lambda) = lambda + sum_i max_k (|x_i|*y_k - lambda*v_k)
// (the conjugate of M* enters through its knots), h is convex and piecewise
// affine in lambda, so the minimum sits at a breakpoint lambda = |x_i|/slope_k
// or at the left domain edge lambda_lo = max_i |x_i| / final_slope. Evaluating
// h at every candidate and taking the minimum is exact up to rounding.
inline double orlicz_norm_vertex(std::span<const double> x_abs,
                                 const PiecewiseAffine& mstar) {
    const std::size_t m = mstar.knot_count() - 1;
    const double sigma_last = mstar.final_slope();
    if (!(sigma_last > 0.0))
        throw DomainExceeded("orlicz norm: dual has zero final slope, sup is unbounded");

    double x_max = 0.0;
    for (double xi : x_abs) x_max = std::max(x_max, xi);
    if (x_max == 0.0) return 0.0;
    const double lambda_lo = x_max / sigma_last;

    std::vector<double> candidates{lambda_lo};
    for (double xi : x_abs) {
        if (xi == 0.0) continue;
        for (std::size_t k = 1; k <= m; ++k) {
            const double s = mstar.slope(k);
            if (s <= 0.0) continue;
            const double lam = xi / s;
            if (lam >= lambda_lo * (1.0 - 1e-14)) candidates.push_back(lam);
        }
    }

    auto h = [&](double lam) {
        double total = lam;
        for (double xi : x_abs) {
            if (xi == 0.0) continue;
            double best = 0.0;
            for (std::size_t k = 1; k <= m; ++k)
                best = std::max(best, xi * mstar.knot_t(k) - lam * mstar.knot_v(k));
            total += best;
        }
        return total;
    };

    double norm = h(candidates.front());
    for (std::size_t i = 1; i < candidates.size(); ++i)
        norm = std::min(norm, h(candidates[i]));
    return norm;
}

// Lagrangian reduction for duals with an invertible derivative: the optimal
// y has y_i = (M*')^{-1}(|x_i|/lambda), and lambda solves
// sum_i M*(y_i(lambda)) = 1 (monotone decreasing in lambda).
inline double orlicz_norm_lagrangian(std::span<const double> x_abs,
                                     const DualFunction& mstar, double tol) {
    double x_max = 0.0;
    for (double xi : x_abs) x_max = std::max(x_max, xi);
    if (x_max == 0.0) return 0.0;

    const double dmax = mstar.domain_max();
    auto constraint = [&](double lam) {
        double total = 0.0;
        bool escaped = false;
        for (double xi : x_abs) {
            if (xi == 0.0) continue;
            double y = mstar.derivative_inverse(xi / lam);
            if (y > dmax) {
                escaped = true;
                y = dmax;
            }
            total += mstar(y);
        }
        if (escaped && total <= 1.0)
            throw DomainExceeded("orlicz norm: maximizer escapes the dual domain");
        return total - 1.0;
    };

    const double lambda = solve_monotone(constraint, x_max, /*increasing=*/false, tol);
    double norm = 0.0;
    for (double xi : x_abs) {
        if (xi == 0.0) continue;
        norm += xi * mstar.derivative_inverse(xi / lambda);
    }
    return norm;
}

inline std::vector<double> absolutes(std::span<const double> x) {
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
    return a;
}

} // namespace detail

// sup { sum_i x_i*y_i : sum_i M*(y_i) <= 1 }. Exact vertex enumeration when
// M* is piecewise affine, otherwise Lagrangian root-finding at relative
// tolerance tol.
inline double orlicz_norm(std::span<const double> x, const DualFunction& mstar,
                          double tol = kRootRelTol) {
    const auto x_abs = detail::absolutes(x);
    if (const PiecewiseAffine* knots = mstar.knots())
        return detail::orlicz_norm_vertex(x_abs, *knots);
    return detail::orlicz_norm_lagrangian(x_abs, mstar, tol);
}

// The gauge lambda > 0 with sum_i M(x_i/lambda) = 1, by monotone
// root-finding. Returns 0 for the zero vector by convention.
inline double luxemburg_norm(std::span<const double> x, const OrliczFunction& m,
                             double tol = kRootRelTol) {
    const auto x_abs = detail::absolutes(x);
    double x_max = 0.0;
    for (double xi : x_abs) x_max = std::max(x_max, xi);
    if (x_max == 0.0) return 0.0;
    auto deficit = [&](double lam) {
        double total = 0.0;
        for (double xi : x_abs)
            if (xi > 0.0) total += m(xi / lam);
        return total - 1.0;
    };
    return solve_monotone(deficit, x_max, /*increasing=*/false, tol);
}

} // namespace orlicz
