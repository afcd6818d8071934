#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "orlicz/errors.hpp"

namespace orlicz {

inline constexpr double kRootRelTol = 1e-10;

// Root of a monotone function on [lo, hi] by bisection. Assumes g(lo) and
// g(hi) bracket zero; monotonicity keeps the bracket valid without sign
// bookkeeping beyond the endpoints.
template <typename G>
double bisect_monotone(G&& g, double lo, double hi, double rel_tol = kRootRelTol) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    const bool increasing = ghi > glo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * (std::abs(mid) + rel_tol)) return mid;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == increasing) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Bisection on the geometric midpoint for a monotone function on
// [lo, hi] with 0 < lo < hi. Converges to relative accuracy even when the
// root is many orders of magnitude below hi, where linear bisection would
// stall at an absolute floor.
template <typename G>
double bisect_monotone_log(G&& g, double lo, double hi,
                           double rel_tol = kRootRelTol) {
    const double glo = g(lo);
    if (glo == 0.0) return lo;
    const double ghi = g(hi);
    if (ghi == 0.0) return hi;
    const bool increasing = ghi > glo;
    for (int it = 0; it < 400 && hi - lo > rel_tol * lo; ++it) {
        const double mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
        if (mid <= lo || mid >= hi) break; // out of representable midpoints
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == increasing) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return std::sqrt(lo) * std::sqrt(hi);
}

// Expands an initial guess into a bracket [lo, hi] with g(lo) <= 0 <= g(hi)
// for increasing g (resp. the mirrored condition for decreasing g), then
// bisects. g must be monotone on (0, inf). Throws DomainExceeded when no
// bracket is found within the expansion budget.
template <typename G>
double solve_monotone(G&& g, double guess, bool increasing,
                      double rel_tol = kRootRelTol) {
    double lo = guess > 0.0 ? guess : 1.0;
    double hi = lo;
    const double sign = increasing ? 1.0 : -1.0;
    int budget = 200;
    while (sign * g(hi) < 0.0) {
        hi *= 2.0;
        if (--budget == 0 || !std::isfinite(hi))
            throw DomainExceeded("monotone solve: no upper bracket");
    }
    while (sign * g(lo) > 0.0) {
        lo *= 0.5;
        if (--budget == 0 || lo < std::numeric_limits<double>::min())
            throw DomainExceeded("monotone solve: no lower bracket");
    }
    return bisect_monotone(g, lo, hi, rel_tol);
}

} // namespace orlicz
