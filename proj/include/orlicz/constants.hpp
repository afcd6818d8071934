#pragma once

#include <cmath>
#include <cstdint>

#include "orlicz/errors.hpp"

namespace orlicz {

// c_n = 1 - 1/2! + 1/3! - ... + (-1)^{n+1}/n! as an exact rational N/n!.
// The numerator recurrence N_{k+1} = (k+1)*N_k + (-1)^k keeps everything in
// integers; both sides fit in 64 bits up to n = 20, past which consecutive
// values agree to well below double precision.
struct RationalCn {
    std::int64_t numerator;
    std::uint64_t denominator; // n!
};

inline RationalCn c_n_rational(int n) {
    if (n < 1 || n > 20)
        throw Error("c_n_rational: exact form available for 1 <= n <= 20");
    std::int64_t num = 1;
    std::uint64_t den = 1;
    for (int k = 1; k < n; ++k) {
        num = num * (k + 1) + (k % 2 == 0 ? 1 : -1);
        den *= static_cast<std::uint64_t>(k + 1);
    }
    return {num, den};
}

// c_n as a double; exact rational arithmetic up to n = 20, constant beyond
// (the tail is below 1/21! and invisible at double precision).
inline double alternating_factorial_constant(int n) {
    if (n < 1) throw Error("alternating_factorial_constant: n must be >= 1");
    const RationalCn r = c_n_rational(n > 20 ? 20 : n);
    return static_cast<double>(r.numerator) / static_cast<double>(r.denominator);
}

// Lower constant (1/(2*sqrt(5))) * (n-1)^2 / (n^2 + (n-1)^2) of the
// quadratic-average sandwich; zero (vacuous) at n = 1.
inline double ave_sandwich_lower_constant(int n) {
    const double nm = static_cast<double>(n - 1);
    const double nd = static_cast<double>(n);
    return (nm * nm / (nd * nd + nm * nm)) / (2.0 * std::sqrt(5.0));
}

// Upper constant 2*sqrt(2) / c_n of the quadratic-average sandwich.
inline double ave_sandwich_upper_constant(int n) {
    return 2.0 * std::sqrt(2.0) / alternating_factorial_constant(n);
}

// Lower constant (n-1)^2 / (n^2 + (n-1)^2) of the two-permutation max bound.
inline double pair_max_lower_constant(int n) {
    const double nm = static_cast<double>(n - 1);
    const double nd = static_cast<double>(n);
    return nm * nm / (nd * nd + nm * nm);
}

} // namespace orlicz
