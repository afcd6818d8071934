#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/piecewise_affine.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/rootfind.hpp"

namespace orlicz {

// The dual (conjugate) function M*(t) = integral_0^t (M')^{-1}(s) ds of an
// Orlicz function, with its inverse map. Three shapes appear in practice:
// exact power duals, piecewise-affine duals given by knots, and numerically
// conjugated user-defined functions. All evaluate at |t|.
class DualFunction {
public:
    using Fn = std::function<double(double)>;

    double operator()(double t) const { return value_(std::abs(t)); }

    double inverse(double v) const { return inverse_(v); }

    // M*'(t) = (M')^{-1}(t).
    double derivative(double t) const { return deriv_(std::abs(t)); }

    // (M*')^{-1}(s) = M'(s); unavailable (set-valued) for piecewise-affine
    // duals, where the norm solver enumerates knot levels instead.
    double derivative_inverse(double s) const {
        if (!deriv_inv_)
            throw Error("dual derivative is set-valued; no pointwise inverse");
        return deriv_inv_(s);
    }

    bool has_smooth_derivative() const { return deriv_inv_ != nullptr; }

    // Nonnull iff the dual is piecewise affine (knots of M* itself).
    const PiecewiseAffine* knots() const { return knots_.get(); }

    double domain_max() const { return domain_max_; }

    const OrliczFunction* source() const { return source_.get(); }

    static DualFunction closed_power(double coeff, double q,
                                     const OrliczFunction& source) {
        DualFunction d;
        d.value_ = [coeff, q](double t) { return coeff * std::pow(t, q); };
        d.inverse_ = [coeff, q](double v) {
            return std::pow(v / coeff, 1.0 / q);
        };
        d.deriv_ = [coeff, q](double t) {
            return coeff * q * std::pow(t, q - 1.0);
        };
        d.deriv_inv_ = [coeff, q](double s) {
            return std::pow(s / (coeff * q), 1.0 / (q - 1.0));
        };
        d.domain_max_ = std::numeric_limits<double>::infinity();
        d.source_ = std::make_shared<OrliczFunction>(source);
        return d;
    }

    static DualFunction from_knots(PiecewiseAffine mstar) {
        DualFunction d;
        auto knots = std::make_shared<PiecewiseAffine>(std::move(mstar));
        d.knots_ = knots;
        d.value_ = [knots](double t) { return (*knots)(t); };
        d.inverse_ = [knots](double v) { return knots->inverse(v); };
        d.deriv_ = [knots](double t) {
            // Slope of the segment containing t (right-continuous at knots).
            const std::size_t m = knots->knot_count();
            if (t >= knots->knot_t(m - 1)) return knots->final_slope();
            std::size_t k = 1;
            while (k < m - 1 && t >= knots->knot_t(k)) ++k;
            return knots->slope(k);
        };
        d.domain_max_ = std::numeric_limits<double>::infinity();
        return d;
    }

    static DualFunction numeric(OrliczFunction source, double t_max, double tol,
                                double deriv_domain_hi) {
        DualFunction d;
        auto src = std::make_shared<OrliczFunction>(std::move(source));
        const double lo_floor = 1e-300;

        // (M')^{-1} on [0, t_max] by log-space bisection, so the inverse keeps
        // relative accuracy even where it is many orders of magnitude below 1
        // (conjugating the result again relies on that).
        auto inv_deriv = [src, t_max, deriv_domain_hi, lo_floor](double s) {
            if (s <= 0.0) return 0.0;
            if (s > t_max * (1.0 + 1e-12))
                throw DomainExceeded("dual derivative asked beyond t_max");
            if (src->derivative(lo_floor) >= s) return 0.0;
            return bisect_monotone_log(
                [&](double t) { return src->derivative(t) - s; }, lo_floor,
                deriv_domain_hi);
        };

        auto value = [inv_deriv, t_max, tol](double t) {
            if (t > t_max * (1.0 + 1e-12))
                throw DomainExceeded("dual evaluated beyond t_max");
            if (t <= 0.0) return 0.0;
            return integrate(inv_deriv, 0.0, t, tol);
        };

        const double v_max = value(t_max);
        auto inverse = [value, t_max, v_max](double v) {
            if (v <= 0.0) return 0.0;
            if (v > v_max * (1.0 + 1e-12))
                throw DomainExceeded("dual inverse asked beyond M*(t_max)");
            return bisect_monotone([&](double t) { return value(t) - v; }, 0.0,
                                   t_max);
        };

        d.value_ = value;
        d.inverse_ = inverse;
        d.deriv_ = inv_deriv;
        d.deriv_inv_ = [src](double s) { return src->derivative(s); };
        d.domain_max_ = t_max;
        d.source_ = src;
        return d;
    }

private:
    DualFunction() = default;

    Fn value_, inverse_, deriv_, deriv_inv_;
    double domain_max_ = 0.0;
    std::shared_ptr<const PiecewiseAffine> knots_;
    std::shared_ptr<const OrliczFunction> source_;
};

namespace detail {

// Probe grid spanning (0, hi]: geometric points resolve behavior near 0,
// linear points cover the bulk.
inline std::vector<double> probe_grid(double hi) {
    std::vector<double> g;
    for (int k = 24; k >= 1; --k) g.push_back(hi * std::ldexp(1.0, -k));
    for (int j = 1; j <= 32; ++j) g.push_back(hi * j / 32.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline void require_strictly_increasing_derivative(const OrliczFunction& m,
                                                   double hi) {
    const auto grid = probe_grid(hi);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d0 = m.derivative(grid[i - 1]);
        const double d1 = m.derivative(grid[i]);
        // The margin is relative to the local derivative scale, so functions
        // whose derivative is genuinely increasing but tiny near zero (e.g.
        // t^4) are not misclassified.
        if (d1 - d0 <= 1e-10 * std::max(std::abs(d0), std::abs(d1)))
            throw NotStrictlyConvex(
                "derivative is not strictly increasing on the probe grid");
    }
}

} // namespace detail

// Dual of M on [0, t_max]: exact for closed-form powers, numeric otherwise.
// For the numeric path, M' is first certified strictly increasing on a probe
// grid and then inverted by monotone root-finding; M* comes from adaptive
// quadrature of the inverse and (M*)^{-1} from root-finding on the computed
// M*.
inline DualFunction conjugate_dual(const OrliczFunction& m, double t_max,
                                   double tol = 1e-9) {
    if (!(t_max > 0.0) || !(tol > 0.0))
        throw Error("conjugate_dual: t_max and tol must be positive");
    if (m.kind() == OrliczKind::closed_form_power) {
        const double p = m.power_exponent();
        const double c = m.power_coefficient();
        const double q = p / (p - 1.0);
        const double cs = std::pow(c * p, -1.0 / (p - 1.0)) / q;
        return DualFunction::closed_power(cs, q, m);
    }
    // Find T with M'(T) >= t_max so that (M')^{-1} covers [0, t_max].
    double hi = 1.0;
    int budget = 200;
    while (m.derivative(hi) < t_max) {
        hi *= 2.0;
        if (--budget == 0 || !std::isfinite(hi))
            throw DomainExceeded("conjugate_dual: M' never reaches t_max");
    }
    detail::require_strictly_increasing_derivative(m, hi);
    return DualFunction::numeric(m, t_max, tol, hi);
}

// Builds M* directly from its knots (t_k, v_k), extended past the last knot
// by the final slope.
inline DualFunction dual_from_knots(PiecewiseAffine mstar_knots) {
    return DualFunction::from_knots(std::move(mstar_knots));
}

// Rescales M to M~(t) = M(alpha*t) with alpha chosen so that M~*(1) = 1,
// using M~*(s) = M*(s/alpha). The property is re-verified after scaling.
inline OrliczFunction normalize_dual_at_one(const OrliczFunction& m,
                                            double tol = 1e-9) {
    double t_max = 1.0;
    DualFunction d = conjugate_dual(m, t_max, tol);
    int budget = 60;
    while (d(t_max) < 1.0) {
        t_max *= 2.0;
        d = conjugate_dual(m, t_max, tol);
        if (--budget == 0)
            throw DomainExceeded("normalize_dual_at_one: M* never reaches 1");
    }
    const double z = d.inverse(1.0); // (M*)^{-1}(1)
    const OrliczFunction scaled = m.scaled(1.0 / z);
    const DualFunction check = conjugate_dual(scaled, 1.0, tol);
    if (std::abs(check(1.0) - 1.0) > 1e-8)
        throw Error("normalize_dual_at_one: post-hoc check failed");
    return scaled;
}

} // namespace orlicz
