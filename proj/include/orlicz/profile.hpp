#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "orlicz/dual.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

// Gap below which H(s) - s*H'(s) is treated as degenerate. The affine
// profile H(t) = c*t sits exactly at zero and admits no density.
inline constexpr double kProfileMargin = 1e-12;

// A concave increasing profile H on [0, 1] with H(0) = 0, twice
// differentiable on (0, 1]. The central object is the gap H(t) - t*H'(t),
// which must stay positive for the density construction to exist.
struct ConcaveProfile {
    std::function<double(double)> value;  // H(t)
    std::function<double(double)> deriv;  // H'(t)
    std::function<double(double)> second; // H''(t)

    double gap(double t) const { return value(t) - t * deriv(t); }
};

// H(t) = scale * t^alpha for 0 < alpha < 1 (alpha = 1 is the degenerate
// affine boundary, representable but rejected by the density operations).
inline ConcaveProfile power_profile(double alpha, double scale = 1.0) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw Error("power_profile: need 0 < alpha <= 1");
    return ConcaveProfile{
        [alpha, scale](double t) { return scale * std::pow(t, alpha); },
        [alpha, scale](double t) { return scale * alpha * std::pow(t, alpha - 1.0); },
        [alpha, scale](double t) {
            return scale * alpha * (alpha - 1.0) * std::pow(t, alpha - 2.0);
        }};
}

// H(t) = (M*^{-1}(t))^2 with derivatives through the inverse-function rule:
//   W  = M*^{-1},  W' = 1 / M*'(W),  W'' = -M*''(W) * W'^3,
//   M*'' = 1 / M''((M')^{-1})  from the source function.
// Falls back to central differences on M*^{-1} (relative step 1e-5) when the
// dual carries no derivative information.
inline ConcaveProfile profile_from_dual(const DualFunction& mstar) {
    if (mstar.has_smooth_derivative() && mstar.source()) {
        auto w = [mstar](double t) { return mstar.inverse(t); };
        auto wprime = [mstar, w](double t) {
            return 1.0 / mstar.derivative(w(t));
        };
        const OrliczFunction src = *mstar.source();
        auto mstar_second = [mstar, src](double u) {
            return 1.0 / src.second_derivative(mstar.derivative(u));
        };
        return ConcaveProfile{
            [w](double t) {
                const double v = w(t);
                return v * v;
            },
            [w, wprime](double t) { return 2.0 * w(t) * wprime(t); },
            [w, wprime, mstar_second](double t) {
                const double v = w(t);
                const double vp = wprime(t);
                const double vpp = -mstar_second(v) * vp * vp * vp;
                return 2.0 * (vp * vp + v * vpp);
            }};
    }
    auto w = [mstar](double t) { return mstar.inverse(t); };
    return ConcaveProfile{
        [w](double t) {
            const double v = w(t);
            return v * v;
        },
        [w](double t) {
            const double h = 1e-5 * std::max(t, 1e-5);
            const double a = w(t - h), b = w(t + h);
            return (b * b - a * a) / (2.0 * h);
        },
        [w](double t) {
            const double h = 1e-5 * std::max(t, 1e-5);
            const double a = w(t - h), b = w(t), c = w(t + h);
            return (c * c - 2.0 * b * b + a * a) / (h * h);
        }};
}

namespace detail {

inline double profile_gap_checked(const ConcaveProfile& hp, double t) {
    const double g = hp.gap(t);
    if (g < kProfileMargin)
        throw DegenerateProfile("profile: H(t) - t*H'(t) below strictness margin");
    return g;
}

} // namespace detail

// The density
//   f(t) = -1/2 * integral_t^1 H''(s)/sqrt(H(s) - s*H'(s)) ds
//          + sqrt(H(1)) - sqrt(H(1) - H'(1)),
// nonnegative and decreasing on (0, 1]. Computed by adaptive quadrature to
// absolute tolerance tol (with a relative floor, since f blows up as t -> 0
// and an absolute target becomes meaningless there). Tiny negative round-off
// is clamped to zero.
inline double f_from_profile(const ConcaveProfile& hp, double t,
                             double tol = 1e-9) {
    if (!(t > 0.0) || t > 1.0)
        throw Error("f_from_profile: t must lie in (0, 1]");
    detail::profile_gap_checked(hp, t);
    const double g1 = detail::profile_gap_checked(hp, 1.0);
    const double h1 = hp.value(1.0);
    const double boundary = std::sqrt(h1) - std::sqrt(g1);
    double integral = 0.0;
    if (t < 1.0) {
        integral = integrate(
            [&hp](double s) {
                return -0.5 * hp.second(s) /
                       std::sqrt(detail::profile_gap_checked(hp, s));
            },
            t, 1.0, tol, 1e-12);
    }
    return std::max(integral + boundary, 0.0);
}

// F(t) = integral_0^t f(s) ds in closed form:
//   F(t) = t*f(t) + sqrt(H(t) - t*H'(t)),   F(0) = 0.
// The identity routes around the singularity of f at zero; no quadrature
// crosses it.
inline double cumulative_f(const ConcaveProfile& hp, double t,
                           double tol = 1e-9) {
    if (t < 0.0 || t > 1.0)
        throw Error("cumulative_f: t must lie in [0, 1]");
    if (t == 0.0) return 0.0;
    const double g = detail::profile_gap_checked(hp, t);
    return t * f_from_profile(hp, t, tol) + std::sqrt(g);
}

// The density f and its cumulative F = integral_0^t f, bundled as callables.
struct DensityF {
    std::function<double(double)> f; // (0, 1]
    std::function<double(double)> F; // [0, 1]
};

inline DensityF density_from_profile(const ConcaveProfile& hp, double tol = 1e-9) {
    return DensityF{
        [hp, tol](double t) { return f_from_profile(hp, t, tol); },
        [hp, tol](double t) { return cumulative_f(hp, t, tol); }};
}

struct ReconstructionReport {
    double max_abs_deviation = 0.0;
    bool pass = false;
    std::vector<double> deviations; // one per grid point
};

// Checks the reconstruction identity
//   H(t) = (integral_0^t f)^2 + t * integral_t^1 f^2
// on the given grid; passes iff the max absolute deviation is within tol.
inline ReconstructionReport reconstruct_H_check(const ConcaveProfile& hp,
                                                std::span<const double> grid,
                                                double tol) {
    ReconstructionReport report;
    for (double t : grid) {
        if (!(t > 0.0) || t > 1.0)
            throw Error("reconstruct_H_check: grid must lie in (0, 1]");
        const double cum = cumulative_f(hp, t);
        double tail = 0.0;
        if (t < 1.0) {
            tail = integrate(
                [&hp](double s) {
                    const double fs = f_from_profile(hp, s);
                    return fs * fs;
                },
                t, 1.0, 1e-10, 1e-12);
        }
        const double dev = std::abs(cum * cum + t * tail - hp.value(t));
        report.deviations.push_back(dev);
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    }
    report.pass = report.max_abs_deviation <= tol;
    return report;
}

} // namespace orlicz
