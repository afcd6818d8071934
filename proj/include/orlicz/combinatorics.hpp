#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "orlicz/constants.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/weights.hpp"

namespace orlicz {

// Square matrix with nonnegative entries, row-major.
class SquareMatrix {
public:
    SquareMatrix(std::size_t n, std::vector<double> entries)
        : n_(n), data_(std::move(entries)) {
        if (data_.size() != n_ * n_)
            throw LengthMismatch("square matrix: entry count must be n^2");
        for (double e : data_)
            if (!(e >= 0.0)) throw Error("square matrix: entries must be nonnegative");
    }

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const std::vector<double>& entries() const { return data_; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

// Cubic tensor a(i, j, k) with nonnegative entries.
class CubeTensor {
public:
    CubeTensor(std::size_t n, std::vector<double> entries)
        : n_(n), data_(std::move(entries)) {
        if (data_.size() != n_ * n_ * n_)
            throw LengthMismatch("cube tensor: entry count must be n^3");
        for (double e : data_)
            if (!(e >= 0.0)) throw Error("cube tensor: entries must be nonnegative");
    }

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * n_ + j) * n_ + k];
    }
    const std::vector<double>& entries() const { return data_; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

// Values sorted nonincreasing. Ties keep no particular order; every quantity
// computed from the table is tie-insensitive.
struct RearrangementTable {
    std::vector<double> values;
    std::size_t source_size = 0;

    // Sum of the top k values.
    double prefix_sum(std::size_t k) const {
        double s = 0.0;
        for (std::size_t i = 0; i < k && i < values.size(); ++i) s += values[i];
        return s;
    }
};

inline RearrangementTable rearrange(std::span<const double> values) {
    RearrangementTable table;
    table.values.assign(values.begin(), values.end());
    table.source_size = values.size();
    std::sort(table.values.begin(), table.values.end(), std::greater<>());
    return table;
}

// Monte Carlo estimate with a 99% normal-approximation half-width.
struct McEstimate {
    double mean = 0.0;
    double half_width_99 = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    double lower() const { return mean - half_width_99; }
    double upper() const { return mean + half_width_99; }
};

// n_max < 0 means "use the operation's default cutoff" (10 for single
// permutations, 6 for permutation pairs).
struct ExactMode {
    int n_max = -1;
};
struct McMode {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};
using AveMode = std::variant<ExactMode, McMode>;
using AveResult = std::variant<double, McEstimate>;

inline double ave_mean(const AveResult& r) {
    if (std::holds_alternative<double>(r)) return std::get<double>(r);
    return std::get<McEstimate>(r).mean;
}

namespace detail {

inline constexpr double kZ99 = 2.5758293035489004; // two-sided 99% quantile

// Compensated accumulation; keeps exact averages insensitive to enumeration
// order at the 1e-12 level required of them.
struct KahanSum {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Visits every permutation of {0, .., n-1} in lexicographic order.
template <typename Visitor>
void for_each_permutation(std::size_t n, Visitor&& visit) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
        visit(std::span<const std::size_t>(idx));
    } while (std::next_permutation(idx.begin(), idx.end()));
}

inline std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

template <typename Sampler>
McEstimate mc_estimate(std::uint64_t samples, std::uint64_t seed, Sampler&& sample) {
    if (samples < 2) throw Error("monte carlo: need at least 2 samples");
    Rng rng(seed);
    // Welford's online mean/variance.
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double v = sample(rng);
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    McEstimate est;
    est.mean = mean;
    est.half_width_99 = kZ99 * std::sqrt(var / static_cast<double>(samples));
    est.samples = samples;
    est.seed = seed;
    return est;
}

} // namespace detail

// Average over permutations pi of (sum_i |x_i * a_{pi(i)}|^2)^{1/2}; exact
// enumeration up to the cutoff, Monte Carlo with Fisher-Yates sampling
// otherwise.
inline double ave_quadratic_exact(std::span<const double> x,
                                  const WeightSequence& a, int n_max = 10) {
    if (x.size() != a.size())
        throw LengthMismatch("ave_quadratic: x and a differ in length");
    const std::size_t n = x.size();
    if (n_max >= 0 && n > static_cast<std::size_t>(n_max))
        throw TooLargeForExact("ave_quadratic: n beyond exact enumeration cutoff");
    detail::KahanSum acc;
    detail::for_each_permutation(n, [&](std::span<const std::size_t> pi) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double term = x[i] * a[pi[i]];
            s += term * term;
        }
        acc.add(std::sqrt(s));
    });
    return acc.sum / static_cast<double>(detail::factorial(n));
}

inline McEstimate ave_quadratic_mc(std::span<const double> x,
                                   const WeightSequence& a,
                                   std::uint64_t samples, std::uint64_t seed) {
    if (x.size() != a.size())
        throw LengthMismatch("ave_quadratic: x and a differ in length");
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return detail::mc_estimate(samples, seed, [&](Rng& rng) {
        rng.shuffle(idx);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double term = x[i] * a[idx[i]];
            s += term * term;
        }
        return std::sqrt(s);
    });
}

inline AveResult ave_quadratic(std::span<const double> x, const WeightSequence& a,
                               const AveMode& mode) {
    if (std::holds_alternative<ExactMode>(mode)) {
        const int cutoff = std::get<ExactMode>(mode).n_max;
        return ave_quadratic_exact(x, a, cutoff < 0 ? 10 : cutoff);
    }
    const auto& mc = std::get<McMode>(mode);
    return ave_quadratic_mc(x, a, mc.samples, mc.seed);
}

// Average of max_i a(i, pi(i)) together with its rearrangement bracket
// [c_n * S, S], S = (1/n) * sum of the top n of all n^2 entries.
struct BracketedAverage {
    AveResult average;
    double lower = 0.0;
    double upper = 0.0;
};

inline BracketedAverage ave_max_matrix(const SquareMatrix& a, const AveMode& mode) {
    const std::size_t n = a.size();
    const RearrangementTable s = rearrange(a.entries());
    const double top_mean = s.prefix_sum(n) / static_cast<double>(n);

    BracketedAverage out;
    out.lower = alternating_factorial_constant(static_cast<int>(n)) * top_mean;
    out.upper = top_mean;

    if (std::holds_alternative<ExactMode>(mode)) {
        const int cutoff_raw = std::get<ExactMode>(mode).n_max;
        const std::size_t cutoff = cutoff_raw < 0 ? 10 : static_cast<std::size_t>(cutoff_raw);
        if (n > cutoff)
            throw TooLargeForExact("ave_max_matrix: n beyond exact enumeration cutoff");
        detail::KahanSum acc;
        detail::for_each_permutation(n, [&](std::span<const std::size_t> pi) {
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                best = std::max(best, a.at(i, pi[i]));
            acc.add(best);
        });
        out.average = acc.sum / static_cast<double>(detail::factorial(n));
        return out;
    }

    const auto& mc = std::get<McMode>(mode);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    out.average = detail::mc_estimate(mc.samples, mc.seed, [&](Rng& rng) {
        rng.shuffle(idx);
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, a.at(i, idx[i]));
        return best;
    });
    return out;
}

// Average of max_i a(i, pi(i), sigma(i)) over independent permutation pairs,
// with the bracket [((n-1)^2/(n^2+(n-1)^2)) * S, S] where S is the mean of
// the top n^2 of all n^3 entries.
inline BracketedAverage ave_max_tensor(const CubeTensor& t, const AveMode& mode) {
    const std::size_t n = t.size();
    const RearrangementTable s = rearrange(t.entries());
    const double top_mean = s.prefix_sum(n * n) / static_cast<double>(n * n);

    BracketedAverage out;
    out.lower = pair_max_lower_constant(static_cast<int>(n)) * top_mean;
    out.upper = top_mean;

    if (std::holds_alternative<ExactMode>(mode)) {
        const int cutoff_raw = std::get<ExactMode>(mode).n_max;
        const std::size_t cutoff = cutoff_raw < 0 ? 6 : static_cast<std::size_t>(cutoff_raw);
        if (n > cutoff)
            throw TooLargeForExact("ave_max_tensor: n beyond exact enumeration cutoff");
        std::vector<std::vector<std::size_t>> perms;
        detail::for_each_permutation(n, [&](std::span<const std::size_t> pi) {
            perms.emplace_back(pi.begin(), pi.end());
        });
        detail::KahanSum acc;
        for (const auto& pi : perms) {
            for (const auto& sigma : perms) {
                double best = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    best = std::max(best, t.at(i, pi[i], sigma[i]));
                acc.add(best);
            }
        }
        const double pairs = static_cast<double>(perms.size()) *
                             static_cast<double>(perms.size());
        out.average = acc.sum / pairs;
        return out;
    }

    const auto& mc = std::get<McMode>(mode);
    std::vector<std::size_t> pi(n), sigma(n);
    std::iota(pi.begin(), pi.end(), std::size_t{0});
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    out.average = detail::mc_estimate(mc.samples, mc.seed, [&](Rng& rng) {
        rng.shuffle(pi);
        rng.shuffle(sigma);
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            best = std::max(best, t.at(i, pi[i], sigma[i]));
        return best;
    });
    return out;
}

} // namespace orlicz
