#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "seedlab/errors.hpp"

namespace seedlab {

struct Aggregate {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;     // sample standard deviation
    double ci95_half = 0.0;  // normal-approximation 95% half width

    static Aggregate of(const std::vector<double>& values) {
        Aggregate a;
        a.n = values.size();
        if (a.n == 0) return a;
        a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.n);
        if (a.n > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - a.mean) * (v - a.mean);
            a.stddev = std::sqrt(ss / static_cast<double>(a.n - 1));
            a.ci95_half = 1.959963984540054 * a.stddev / std::sqrt(static_cast<double>(a.n));
        }
        return a;
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Inverse standard normal CDF by bisection; plenty of precision for test
/// thresholds.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("quantile probability must lie in (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// z statistic for the one-sided alternative p2 > p1, pooled variance.
inline double two_proportion_z(std::int64_t hits1, std::int64_t n1, std::int64_t hits2,
                               std::int64_t n2) {
    if (n1 < 1 || n2 < 1) throw InputError("sample sizes must be positive");
    const double p1 = static_cast<double>(hits1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(hits2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(hits1 + hits2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return 0.0;
    return (p2 - p1) / se;
}

/// z statistic (Welch, normal approximation) for the one-sided alternative
/// mean2 > mean1.
inline double welch_z(const Aggregate& a1, const Aggregate& a2) {
    const double se = std::sqrt(a1.stddev * a1.stddev / static_cast<double>(a1.n) +
                                a2.stddev * a2.stddev / static_cast<double>(a2.n));
    if (se == 0.0) return 0.0;
    return (a2.mean - a1.mean) / se;
}

inline std::vector<double> ranks(const std::vector<double>& values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    std::vector<double> r(values.size());
    for (std::size_t pos = 0; pos < idx.size(); ++pos) r[idx[pos]] = static_cast<double>(pos + 1);
    return r;
}

/// Spearman rank correlation between position order and the given values.
inline double spearman_rho(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw InputError("spearman_rho needs at least two values");
    const std::vector<double> r = ranks(values);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = r[i] - static_cast<double>(i + 1);
        d2 += d * d;
    }
    const auto nd = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (nd * (nd * nd - 1.0));
}

/// Exact one-sided permutation p-value for an increasing trend: the fraction
/// of permutations whose Spearman rho is at least the observed one. Only for
/// short sequences (n <= 8).
inline double spearman_trend_pvalue(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2 || n > 8) throw InputError("exact trend test supports 2..8 values");
    const double observed = spearman_rho(values);
    std::vector<double> perm(values);
    std::sort(perm.begin(), perm.end());
    std::int64_t total = 0, at_least = 0;
    do {
        ++total;
        if (spearman_rho(perm) >= observed - 1e-12) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

/// Half width of a binomial confidence bound around a probability p. The
/// z^2/n term keeps the bound valid in the small-count regime where the
/// plain normal approximation collapses.
inline double binomial_halfwidth(double p, double n, double z) {
    const double clamped = std::clamp(p, 0.0, 1.0);
    return z * std::sqrt(clamped * (1.0 - clamped) / n) + z * z / n;
}

}  // namespace seedlab
