#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcte/routing.hpp"

namespace tcte {

// ---------------------------------------------------------------------------
// Rank metrics. A position of 0 means "ground truth not in the ranking"
// (unreachable); such questions count in the denominator and score 0.

inline std::vector<double> reciprocal_ranks(const std::vector<std::size_t>& positions) {
    std::vector<double> rr;
    rr.reserve(positions.size());
    for (std::size_t p : positions) rr.push_back(p == 0 ? 0.0 : 1.0 / static_cast<double>(p));
    return rr;
}

inline double mrr(const std::vector<std::size_t>& positions) {
    if (positions.empty()) throw ConfigError("mrr: empty test set");
    double s = 0.0;
    for (std::size_t p : positions) s += p == 0 ? 0.0 : 1.0 / static_cast<double>(p);
    return s / static_cast<double>(positions.size());
}

inline double precision_at(const std::vector<std::size_t>& positions, std::size_t r) {
    if (positions.empty()) throw ConfigError("precision_at: empty test set");
    std::size_t hit = 0;
    for (std::size_t p : positions)
        if (p != 0 && p <= r) ++hit;
    return static_cast<double>(hit) / static_cast<double>(positions.size());
}

// ---------------------------------------------------------------------------
// Paired Wilcoxon signed-rank test

struct PairedTestResult {
    std::string method_a;
    std::string method_b;
    double statistic = 0.0;  // W+ (sum of positive-signed ranks)
    double p_value = 1.0;
    int n = 0;  // pairs after dropping zero differences
    bool exact = false;
    double significance_threshold = 0.01;

    bool significant() const { return p_value < significance_threshold; }
};

namespace detail {

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Exact two-sided p-value via the permutation distribution of W+ over all
// sign assignments, computed by DP over doubled (integer) midranks.
inline double wilcoxon_exact_p(const std::vector<double>& ranks, double w_plus) {
    std::vector<std::int64_t> r2;
    std::int64_t total = 0;
    for (double r : ranks) {
        r2.push_back(static_cast<std::int64_t>(std::llround(2.0 * r)));
        total += r2.back();
    }
    // counts[s] = number of sign patterns with doubled W+ == s
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    for (std::int64_t r : r2)
        for (std::int64_t s = total; s >= r; --s) counts[s] += counts[s - r];

    const double w2 = 2.0 * w_plus;
    double le = 0.0, ge = 0.0, all = 0.0;
    for (std::int64_t s = 0; s <= total; ++s) {
        all += counts[s];
        if (static_cast<double>(s) <= w2 + 1e-9) le += counts[s];
        if (static_cast<double>(s) >= w2 - 1e-9) ge += counts[s];
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / all);
}

}  // namespace detail

// Two-sided paired Wilcoxon signed-rank test. Exact permutation distribution
// for n <= 25, tie-corrected normal approximation above.
inline PairedTestResult wilcoxon_paired(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        double significance_threshold = 0.01) {
    if (x.size() != y.size()) throw ConfigError("wilcoxon_paired: length mismatch");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    PairedTestResult res;
    res.significance_threshold = significance_threshold;
    res.n = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        res.p_value = 1.0;
        return res;
    }

    // midranks of |d|
    std::vector<std::size_t> idx(diffs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(diffs[a]) < std::fabs(diffs[b]); });
    std::vector<double> ranks(diffs.size(), 0.0);
    double tie_correction = 0.0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && std::fabs(diffs[idx[j]]) == std::fabs(diffs[idx[i]])) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = mid;
        const double t = static_cast<double>(j - i);
        tie_correction += t * t * t - t;
        i = j;
    }

    double w_plus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w_plus += ranks[i];
    res.statistic = w_plus;

    const double n = static_cast<double>(diffs.size());
    if (diffs.size() <= 25) {
        res.exact = true;
        res.p_value = detail::wilcoxon_exact_p(ranks, w_plus);
    } else {
        const double mu = n * (n + 1.0) / 4.0;
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_correction / 48.0;
        if (var <= 0.0) {
            res.p_value = 1.0;
            return res;
        }
        const double z = (w_plus - mu) / std::sqrt(var);
        res.p_value = std::min(1.0, 2.0 * detail::normal_sf(std::fabs(z)));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Report containers

struct MethodMetrics {
    double mrr = 0.0;
    double p_at_5 = 0.0;
    double p_at_10 = 0.0;
    std::vector<double> per_question_rr;
};

struct MetricsReport {
    std::map<Method, MethodMetrics> methods;
    std::size_t question_count = 0;
    std::size_t unreachable_count = 0;
    std::size_t unroutable_count = 0;
    std::string config_fingerprint;
};

}  // namespace tcte
