#pragma once

// Brute-force reference implementations used only by tests. Each one takes a
// deliberately different route from the library code it checks: enumeration
// instead of dynamic programming, pairwise counting instead of rank algebra.

#include <cmath>
#include <cstdint>
#include <vector>

#include "frontier_audit/stats.hpp"

namespace oracle {

using frontier_audit::stats::Alternative;

// Quadratic average ranks: 1 + (#smaller) + (#equal among others)/2.
inline std::vector<double> naive_ranks(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        double smaller = 0.0, equal = 0.0;
        for (size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) smaller += 1.0;
            if (j != i && v[j] == v[i]) equal += 1.0;
        }
        out[i] = 1.0 + smaller + equal / 2.0;
    }
    return out;
}

// Exact signed-rank p by walking all 2^n sign assignments explicitly.
inline double wilcoxon_signflip_p(const std::vector<double>& diffs, Alternative alt) {
    std::vector<double> nz;
    for (double d : diffs)
        if (d != 0.0) nz.push_back(d);
    const size_t n = nz.size();
    if (n == 0) return 1.0;
    std::vector<double> abs(n);
    for (size_t i = 0; i < n; ++i) abs[i] = std::fabs(nz[i]);
    std::vector<double> ranks = naive_ranks(abs);

    double w_obs = 0.0;
    for (size_t i = 0; i < n; ++i)
        if (nz[i] > 0.0) w_obs += ranks[i];
    const long w2_obs = std::llround(2.0 * w_obs);

    double le = 0.0, ge = 0.0;
    const std::uint64_t masks = 1ull << n;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        double w = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (mask & (1ull << i)) w += ranks[i];
        long w2 = std::llround(2.0 * w);
        if (w2 <= w2_obs) le += 1.0;
        if (w2 >= w2_obs) ge += 1.0;
    }
    double total = static_cast<double>(masks);
    double p_le = le / total, p_ge = ge / total;
    switch (alt) {
        case Alternative::greater:
            return p_ge;
        case Alternative::less:
            return p_le;
        default:
            return std::min(1.0, 2.0 * std::min(p_le, p_ge));
    }
}

namespace detail {

inline void mw_splits(const std::vector<double>& pooled, std::vector<size_t>& pick, size_t next,
                      size_t n1, long u2_obs, double& le, double& ge, double& total) {
    if (pick.size() == n1) {
        std::vector<char> in_x(pooled.size(), 0);
        for (size_t idx : pick) in_x[idx] = 1;
        double u = 0.0;
        for (size_t i = 0; i < pooled.size(); ++i) {
            if (!in_x[i]) continue;
            for (size_t j = 0; j < pooled.size(); ++j) {
                if (in_x[j]) continue;
                if (pooled[i] > pooled[j]) u += 1.0;
                if (pooled[i] == pooled[j]) u += 0.5;
            }
        }
        long u2 = std::llround(2.0 * u);
        total += 1.0;
        if (u2 <= u2_obs) le += 1.0;
        if (u2 >= u2_obs) ge += 1.0;
        return;
    }
    if (next >= pooled.size()) return;
    if (pooled.size() - next < n1 - pick.size()) return;
    pick.push_back(next);
    mw_splits(pooled, pick, next + 1, n1, u2_obs, le, ge, total);
    pick.pop_back();
    mw_splits(pooled, pick, next + 1, n1, u2_obs, le, ge, total);
}

}  // namespace detail

// Exact Mann-Whitney p by enumerating every split of the pooled sample and
// counting pairwise wins directly.
inline double mann_whitney_split_p(const std::vector<double>& x, const std::vector<double>& y,
                                   Alternative alt) {
    double u_obs = 0.0;
    for (double xi : x)
        for (double yj : y) {
            if (xi > yj) u_obs += 1.0;
            if (xi == yj) u_obs += 0.5;
        }
    long u2_obs = std::llround(2.0 * u_obs);

    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<size_t> pick;
    double le = 0.0, ge = 0.0, total = 0.0;
    detail::mw_splits(pooled, pick, 0, x.size(), u2_obs, le, ge, total);
    double p_le = le / total, p_ge = ge / total;
    switch (alt) {
        case Alternative::greater:
            return p_ge;
        case Alternative::less:
            return p_le;
        default:
            return std::min(1.0, 2.0 * std::min(p_le, p_ge));
    }
}

}  // namespace oracle
