#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/piecewise_affine.hpp"

namespace orlicz {

enum class OrliczKind { closed_form_power, piecewise_affine_dual, user_defined };

// An Orlicz function M: even, convex, M(0) = 0, M(t) > 0 for t != 0.
// Only t >= 0 is stored; every entry point takes |t| first, so kernels never
// see negative arguments. Closed-form powers M(t) = c*|t|^p keep exact
// derivatives; user-defined functions fall back to central differences for
// the second derivative when none is supplied.
class OrliczFunction {
public:
    using Fn = std::function<double(double)>;

    // M(t) = coeff * |t|^p. The default coefficient 1/p makes M'(1) = 1 and
    // gives the conjugate pair M*(t) = |t|^q / q with 1/p + 1/q = 1.
    static OrliczFunction power(double p) { return power(p, 1.0 / p); }

    static OrliczFunction power(double p, double coeff) {
        if (!(p > 1.0)) throw Error("power orlicz function: need p > 1");
        if (!(coeff > 0.0)) throw Error("power orlicz function: need coeff > 0");
        OrliczFunction m;
        m.kind_ = OrliczKind::closed_form_power;
        m.p_ = p;
        m.c_ = coeff;
        return m;
    }

    static OrliczFunction from_callables(Fn value, Fn deriv, Fn second = nullptr) {
        OrliczFunction m;
        m.kind_ = OrliczKind::user_defined;
        m.value_ = std::move(value);
        m.deriv_ = std::move(deriv);
        m.second_ = std::move(second);
        return m;
    }

    // The convex conjugate of a piecewise-affine dual, M(t) = max_k(t*y_k - v_k)
    // over the dual's knots (y_k, v_k). Its derivative is the step function
    // jumping between knot levels; there is no second derivative.
    static OrliczFunction conjugate_of_dual_knots(PiecewiseAffine dual_knots) {
        OrliczFunction m;
        m.kind_ = OrliczKind::piecewise_affine_dual;
        m.dual_knots_ = std::make_shared<PiecewiseAffine>(std::move(dual_knots));
        return m;
    }

    double operator()(double t) const {
        t = std::abs(t);
        switch (kind_) {
            case OrliczKind::closed_form_power:
                return c_ * std::pow(t, p_);
            case OrliczKind::piecewise_affine_dual: {
                double best = 0.0;
                const auto& d = *dual_knots_;
                for (std::size_t k = 1; k < d.knot_count(); ++k)
                    best = std::max(best, t * d.knot_t(k) - d.knot_v(k));
                return best;
            }
            case OrliczKind::user_defined:
                return value_(t);
        }
        return 0.0;
    }

    double derivative(double t) const {
        t = std::abs(t);
        switch (kind_) {
            case OrliczKind::closed_form_power:
                return c_ * p_ * std::pow(t, p_ - 1.0);
            case OrliczKind::piecewise_affine_dual: {
                // d/dt max_k(t*y_k - v_k) = y_k at the active knot.
                const auto& d = *dual_knots_;
                double best = 0.0, arg = 0.0;
                for (std::size_t k = 1; k < d.knot_count(); ++k) {
                    const double cand = t * d.knot_t(k) - d.knot_v(k);
                    if (cand > best) {
                        best = cand;
                        arg = d.knot_t(k);
                    }
                }
                return arg;
            }
            case OrliczKind::user_defined:
                return deriv_(t);
        }
        return 0.0;
    }

    bool has_second_derivative() const {
        return kind_ == OrliczKind::closed_form_power ||
               (kind_ == OrliczKind::user_defined && second_ != nullptr);
    }

    double second_derivative(double t) const {
        t = std::abs(t);
        if (kind_ == OrliczKind::closed_form_power)
            return c_ * p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
        if (kind_ == OrliczKind::user_defined && second_)
            return second_(t);
        // Central difference on M', step proportional to t away from 0.
        const double h = std::max(1e-5, 1e-5 * t);
        if (t > h) return (derivative(t + h) - derivative(t - h)) / (2.0 * h);
        return (derivative(t + h) - derivative(t)) / h;
    }

    OrliczKind kind() const { return kind_; }

    double power_exponent() const { return p_; }
    double power_coefficient() const { return c_; }

    const PiecewiseAffine* dual_knots() const {
        return dual_knots_ ? dual_knots_.get() : nullptr;
    }

    // The rescaled function t -> M(alpha * t).
    OrliczFunction scaled(double alpha) const {
        if (!(alpha > 0.0)) throw Error("scaled: alpha must be positive");
        switch (kind_) {
            case OrliczKind::closed_form_power:
                return power(p_, c_ * std::pow(alpha, p_));
            case OrliczKind::piecewise_affine_dual: {
                // max_k(alpha*t*y_k - v_k): rescale the dual knot positions.
                const auto& d = *dual_knots_;
                std::vector<double> t(d.knot_count()), v(d.knot_count());
                for (std::size_t k = 0; k < d.knot_count(); ++k) {
                    t[k] = d.knot_t(k) * alpha;
                    v[k] = d.knot_v(k);
                }
                return conjugate_of_dual_knots(
                    PiecewiseAffine(std::move(t), std::move(v)));
            }
            case OrliczKind::user_defined: {
                Fn val = value_, der = deriv_, sec = second_;
                return from_callables(
                    [val, alpha](double t) { return val(alpha * t); },
                    [der, alpha](double t) { return alpha * der(alpha * t); },
                    sec ? Fn([sec, alpha](double t) {
                        return alpha * alpha * sec(alpha * t);
                    })
                        : Fn(nullptr));
            }
        }
        throw Error("scaled: unreachable");
    }

private:
    OrliczFunction() = default;

    OrliczKind kind_ = OrliczKind::user_defined;
    Fn value_, deriv_, second_;
    double p_ = 0.0, c_ = 0.0;
    std::shared_ptr<const PiecewiseAffine> dual_knots_;
};

struct TwoConcavityReport {
    struct Violation {
        std::size_t index; // middle point of the failing triple
        double gap;        // phi(t2) - chord; negative means convexity there
    };
    bool two_concave = true;
    double min_gap = 0.0; // most adverse gap over all triples
    std::vector<Violation> violations;
};

// Three-point concavity test for phi(t) = M(sqrt(t)) on every consecutive
// triple of the grid. The grid must be strictly increasing with at least
// three positive points.
inline TwoConcavityReport two_concavity_check(const OrliczFunction& m,
                                              std::span<const double> grid,
                                              double tol = 1e-9) {
    if (grid.size() < 3)
        throw Error("two_concavity_check: grid needs at least 3 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw Error("two_concavity_check: grid must be positive and strictly increasing");
    }
    TwoConcavityReport report;
    bool first = true;
    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
        const double t1 = grid[i], t2 = grid[i + 1], t3 = grid[i + 2];
        const double lambda = (t3 - t2) / (t3 - t1);
        const double chord = lambda * m(std::sqrt(t1)) + (1.0 - lambda) * m(std::sqrt(t3));
        const double gap = m(std::sqrt(t2)) - chord;
        if (first || gap < report.min_gap) {
            report.min_gap = gap;
            first = false;
        }
        if (gap < -tol) {
            report.two_concave = false;
            report.violations.push_back({i + 1, gap});
        }
    }
    return report;
}

} // namespace orlicz
