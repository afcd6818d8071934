#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

// Finite nonincreasing positive weights a_1 >= a_2 >= ... >= a_n > 0.
class WeightSequence {
public:
    explicit WeightSequence(std::vector<double> a) : a_(std::move(a)) {
        if (a_.empty())
            throw NotDecreasing("weight sequence: must be nonempty");
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (!(a_[i] > 0.0))
                throw NotDecreasing("weight sequence: entries must be positive");
            if (i > 0 && a_[i] > a_[i - 1])
                throw NotDecreasing("weight sequence: entries must be nonincreasing");
        }
    }

    std::size_t size() const { return a_.size(); }
    double operator[](std::size_t i) const { return a_[i]; }
    const std::vector<double>& values() const { return a_; }

private:
    std::vector<double> a_;
};

// The sequence b with prefix sums sum_{j<=k} b_j = sqrt(n*k), i.e.
// b_k = sqrt(n*k) - sqrt(n*(k-1)); positive and decreasing.
inline WeightSequence sqrt_prefix_b(int n) {
    if (n < 1) throw Error("sqrt_prefix_b: n must be >= 1");
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        b[static_cast<std::size_t>(k - 1)] =
            std::sqrt(static_cast<double>(n) * k) -
            std::sqrt(static_cast<double>(n) * (k - 1));
    }
    return WeightSequence(std::move(b));
}

} // namespace orlicz
