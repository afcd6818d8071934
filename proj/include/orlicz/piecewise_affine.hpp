#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

// Monotone piecewise-affine function given by knots (t_k, v_k) with
// t_0 = 0, v_0 = 0, t strictly increasing and v nondecreasing. Evaluation
// interpolates between knots and continues with the final slope beyond the
// last knot, which preserves convexity and keeps sublevel sets bounded.
class PiecewiseAffine {
public:
    PiecewiseAffine(std::vector<double> t, std::vector<double> v,
                    bool concave = false)
        : t_(std::move(t)), v_(std::move(v)), concave_(concave) {
        if (t_.size() != v_.size())
            throw LengthMismatch("piecewise affine: knot arrays differ in length");
        if (t_.size() < 2)
            throw Error("piecewise affine: need at least two knots");
        if (t_.front() != 0.0 || v_.front() != 0.0)
            throw Error("piecewise affine: first knot must be (0, 0)");
        for (std::size_t k = 1; k < t_.size(); ++k) {
            if (!(t_[k] > t_[k - 1]))
                throw Error("piecewise affine: knot positions must increase strictly");
            if (v_[k] < v_[k - 1])
                throw Error("piecewise affine: knot values must be nondecreasing");
        }
    }

    std::size_t knot_count() const { return t_.size(); }
    double knot_t(std::size_t k) const { return t_[k]; }
    double knot_v(std::size_t k) const { return v_[k]; }
    bool concave() const { return concave_; }

    double final_slope() const {
        const std::size_t m = t_.size() - 1;
        return (v_[m] - v_[m - 1]) / (t_[m] - t_[m - 1]);
    }

    // Slope of segment k, between knots k-1 and k (k = 1 .. knot_count()-1).
    double slope(std::size_t k) const {
        return (v_[k] - v_[k - 1]) / (t_[k] - t_[k - 1]);
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= t_.back()) return v_.back() + final_slope() * (t - t_.back());
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - t_.begin());
        const double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
        return v_[k - 1] + w * (v_[k] - v_[k - 1]);
    }

    // Inverse evaluation; requires strictly increasing knot values.
    double inverse(double v) const {
        if (v <= 0.0) return 0.0;
        if (v >= v_.back()) {
            const double s = final_slope();
            if (s <= 0.0)
                throw NotStrictlyIncreasing("piecewise affine: flat tail has no inverse");
            return t_.back() + (v - v_.back()) / s;
        }
        const auto it = std::upper_bound(v_.begin(), v_.end(), v);
        const std::size_t k = static_cast<std::size_t>(it - v_.begin());
        if (v_[k] == v_[k - 1])
            throw NotStrictlyIncreasing("piecewise affine: flat segment has no inverse");
        const double w = (v - v_[k - 1]) / (v_[k] - v_[k - 1]);
        return t_[k - 1] + w * (t_[k] - t_[k - 1]);
    }

    // The inverse function as a piecewise-affine object (coordinates swapped).
    PiecewiseAffine inverted() const {
        for (std::size_t k = 1; k < v_.size(); ++k) {
            if (!(v_[k] > v_[k - 1]))
                throw NotStrictlyIncreasing(
                    "piecewise affine: values must increase strictly to invert");
        }
        return PiecewiseAffine(v_, t_);
    }

    // Three-point concavity at every interior knot, to tolerance.
    bool check_concave(double tol = 1e-9) const {
        for (std::size_t k = 1; k + 1 < t_.size(); ++k) {
            const double lambda = (t_[k + 1] - t_[k]) / (t_[k + 1] - t_[k - 1]);
            const double chord = lambda * v_[k - 1] + (1.0 - lambda) * v_[k + 1];
            if (v_[k] < chord - tol) return false;
        }
        return true;
    }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    bool concave_;
};

} // namespace orlicz
