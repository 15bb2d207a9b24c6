#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "detail/linalg.hpp"
#include "errors.hpp"

// Hand-rolled statistical procedures. Everything here is deliberately
// dependency-free and exact where the pre-registered analysis calls for
// exactness (small-sample rank tests enumerate their null distributions
// instead of approximating them).
namespace frontier_audit::stats {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class Alternative : unsigned char { two_sided, greater, less };

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::string method;  // "exact" | "normal_approx" | "degenerate"
    double effect = 0.0;
    size_t n1 = 0, n2 = 0;
};

// ---- basic descriptive helpers ---------------------------------------------

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("mean of empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw ValidationError("median of empty sample");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Nearest-rank percentile: the smallest element with at least p of the mass
// at or below it. p in (0, 1].
inline double percentile_nearest_rank(std::vector<double> v, double p) {
    if (v.empty()) throw ValidationError("percentile of empty sample");
    if (p <= 0.0 || p > 1.0) throw ValidationError("percentile p outside (0,1]");
    std::sort(v.begin(), v.end());
    size_t rank = static_cast<size_t>(std::ceil(p * static_cast<double>(v.size())));
    rank = std::max<size_t>(1, std::min(rank, v.size()));
    return v[rank - 1];
}

inline Interval iqr(const std::vector<double>& v) {
    return {percentile_nearest_rank(v, 0.25), percentile_nearest_rank(v, 0.75)};
}

// Ranks 1..n with ties sharing the average of the positions they occupy.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// ---- normal and chi-square distribution functions --------------------------

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Acklam's rational approximation, polished with one Newton step.
inline double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw ValidationError("normal quantile needs p in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    x -= e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    return x;
}

namespace detail_gamma {

// Regularized incomplete gamma, series branch (x < a+1).
inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction branch (x >= a+1), modified Lentz.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail_gamma

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double x, double df) {
    if (x < 0.0 || df <= 0.0) throw ValidationError("chi_square_sf needs x >= 0, df > 0");
    if (x == 0.0) return 1.0;
    double a = df / 2.0, half = x / 2.0;
    return half < a + 1.0 ? 1.0 - detail_gamma::gamma_p_series(a, half)
                          : detail_gamma::gamma_q_cf(a, half);
}

// ---- proportions ------------------------------------------------------------

inline Interval wilson(size_t k, size_t n, double confidence = 0.95) {
    if (n == 0) throw ValidationError("wilson interval needs n > 0");
    if (k > n) throw ValidationError("wilson interval needs k <= n");
    double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double hw = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // the exact endpoints at the degenerate corners, without float dust
    double lo = k == 0 ? 0.0 : std::max(0.0, center - hw);
    double hi = k == n ? 1.0 : std::min(1.0, center + hw);
    return {lo, hi};
}

// Bonferroni-widened Wilson interval: one of m simultaneous intervals at
// family confidence 1 - alpha.
inline Interval wilson_simultaneous(size_t k, size_t n, double alpha, size_t m) {
    if (m == 0) throw ValidationError("wilson_simultaneous needs m >= 1");
    return wilson(k, n, 1.0 - alpha / static_cast<double>(m));
}

// Pooled two-proportion z test, no continuity correction (so that the squared
// statistic equals the Pearson chi-square on the same 2x2 table).
inline TestResult two_proportion_z(size_t k1, size_t n1, size_t k2, size_t n2,
                                   Alternative alt = Alternative::two_sided) {
    if (n1 == 0 || n2 == 0) throw ValidationError("two_proportion_z needs both n > 0");
    double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    double se = std::sqrt(pooled * (1.0 - pooled) *
                          (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return {0.0, 1.0, "degenerate", p1 - p2, n1, n2};
    double z = (p1 - p2) / se;
    double p = alt == Alternative::two_sided ? 2.0 * normal_sf(std::fabs(z))
               : alt == Alternative::greater ? normal_sf(z)
                                             : normal_cdf(z);
    return {z, std::min(1.0, p), "normal_approx", p1 - p2, n1, n2};
}

// Pearson chi-square over an r x c count table.
inline TestResult chi_square(const std::vector<std::vector<double>>& counts) {
    size_t r = counts.size();
    if (r < 2) throw ValidationError("chi_square needs at least 2 rows");
    size_t c = counts[0].size();
    if (c < 2) throw ValidationError("chi_square needs at least 2 columns");
    std::vector<double> row(r, 0.0), col(c, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < r; ++i) {
        if (counts[i].size() != c) throw ValidationError("ragged chi_square table");
        for (size_t j = 0; j < c; ++j) {
            if (counts[i][j] < 0.0) throw ValidationError("negative count");
            row[i] += counts[i][j];
            col[j] += counts[i][j];
            total += counts[i][j];
        }
    }
    for (double v : row)
        if (v == 0.0) throw ValidationError("chi_square table has an empty row");
    for (double v : col)
        if (v == 0.0) throw ValidationError("chi_square table has an empty column");
    double stat = 0.0;
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) {
            double expected = row[i] * col[j] / total;
            double d = counts[i][j] - expected;
            stat += d * d / expected;
        }
    double df = static_cast<double>((r - 1) * (c - 1));
    TestResult out{stat, chi_square_sf(stat, df), "chi_square", 0.0,
                   static_cast<size_t>(total), 0};
    out.n2 = static_cast<size_t>(df);
    return out;
}

// ---- rank tests --------------------------------------------------------------

// Wilcoxon signed-rank test on a vector of differences. Zeros are discarded
// before ranking. For n <= exact_max the full sign-flip null distribution is
// enumerated (a subset-sum walk over doubled ranks, so midpoint ranks from
// ties stay integral); beyond that a tie-corrected normal approximation with
// continuity correction is used. Two-sided exact p doubles the smaller tail.
inline TestResult wilcoxon_signed_rank(const std::vector<double>& diffs,
                                       Alternative alt = Alternative::two_sided,
                                       size_t exact_max = 25) {
    std::vector<double> nz;
    for (double d : diffs)
        if (d != 0.0) nz.push_back(d);
    const size_t n = nz.size();
    TestResult out;
    out.effect = diffs.empty() ? 0.0 : median(diffs);
    out.n1 = n;
    if (n == 0) {
        out.method = "degenerate";
        return out;
    }

    std::vector<double> abs(n);
    for (size_t i = 0; i < n; ++i) abs[i] = std::fabs(nz[i]);
    std::vector<double> ranks = average_ranks(abs);
    double w_plus = 0.0;
    for (size_t i = 0; i < n; ++i)
        if (nz[i] > 0.0) w_plus += ranks[i];
    out.statistic = w_plus;

    if (n <= exact_max) {
        // counts[s] = number of sign assignments whose doubled positive-rank
        // sum is s; 2^n assignments total, exactly representable in double.
        const long total2 = static_cast<long>(std::llround(
            2.0 * std::accumulate(ranks.begin(), ranks.end(), 0.0)));
        std::vector<double> counts(static_cast<size_t>(total2) + 1, 0.0);
        counts[0] = 1.0;
        long reach = 0;
        for (size_t i = 0; i < n; ++i) {
            long dr = static_cast<long>(std::llround(2.0 * ranks[i]));
            for (long s = reach; s >= 0; --s)
                if (counts[static_cast<size_t>(s)] > 0.0)
                    counts[static_cast<size_t>(s + dr)] += counts[static_cast<size_t>(s)];
            reach += dr;
        }
        const double denom = std::pow(2.0, static_cast<double>(n));
        const long w2 = static_cast<long>(std::llround(2.0 * w_plus));
        double below = 0.0, above = 0.0;
        for (long s = 0; s <= total2; ++s) {
            if (s <= w2) below += counts[static_cast<size_t>(s)];
            if (s >= w2) above += counts[static_cast<size_t>(s)];
        }
        double p_le = below / denom, p_ge = above / denom;
        out.p_value = alt == Alternative::greater ? p_ge
                      : alt == Alternative::less  ? p_le
                                                  : std::min(1.0, 2.0 * std::min(p_le, p_ge));
        out.method = "exact";
        return out;
    }

    double nn = static_cast<double>(n);
    double mu = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    // tie correction over groups of equal |d|
    std::map<double, size_t> groups;
    for (double a : abs) ++groups[a];
    for (auto& [value, t] : groups) {
        (void)value;
        double td = static_cast<double>(t);
        var -= (td * td * td - td) / 48.0;
    }
    if (var <= 0.0) {
        out.method = "degenerate";
        out.p_value = 1.0;
        return out;
    }
    double cc = w_plus > mu ? -0.5 : (w_plus < mu ? 0.5 : 0.0);
    double z = (w_plus - mu + cc) / std::sqrt(var);
    out.p_value = alt == Alternative::two_sided ? 2.0 * normal_sf(std::fabs(z))
                  : alt == Alternative::greater ? normal_sf(z)
                                                : normal_cdf(z);
    out.p_value = std::min(1.0, out.p_value);
    out.method = "normal_approx";
    return out;
}

// Mann-Whitney U for two independent samples. U reported for the first
// sample, ties counted half. Exact permutation enumeration when both samples
// are small (all choose(n1+n2, n1) splits of the pooled observed values);
// otherwise tie-corrected normal approximation with continuity correction.
inline TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y,
                                 Alternative alt = Alternative::two_sided,
                                 size_t exact_max = 8) {
    const size_t n1 = x.size(), n2 = y.size();
    if (n1 == 0 || n2 == 0) throw ValidationError("mann_whitney_u needs both samples nonempty");
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<double> ranks = average_ranks(pooled);
    double r1 = 0.0;
    for (size_t i = 0; i < n1; ++i) r1 += ranks[i];
    double u1 = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;

    TestResult out;
    out.statistic = u1;
    out.effect = median(x) - median(y);
    out.n1 = n1;
    out.n2 = n2;

    if (n1 <= exact_max && n2 <= exact_max) {
        const size_t n = n1 + n2;
        const long u2_obs = static_cast<long>(std::llround(2.0 * u1));
        std::vector<size_t> pick(n1);
        std::iota(pick.begin(), pick.end(), size_t{0});
        double count_le = 0.0, count_ge = 0.0, total = 0.0;
        const double offset = static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
        for (;;) {
            double rsum = 0.0;
            for (size_t idx : pick) rsum += ranks[idx];
            long u2 = static_cast<long>(std::llround(2.0 * (rsum - offset)));
            total += 1.0;
            if (u2 <= u2_obs) count_le += 1.0;
            if (u2 >= u2_obs) count_ge += 1.0;
            // next combination in lexicographic order
            size_t i = n1;
            while (i > 0 && pick[i - 1] == n - n1 + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (size_t j = i; j < n1; ++j) pick[j] = pick[j - 1] + 1;
        }
        double p_le = count_le / total, p_ge = count_ge / total;
        out.p_value = alt == Alternative::greater ? p_ge
                      : alt == Alternative::less  ? p_le
                                                  : std::min(1.0, 2.0 * std::min(p_le, p_ge));
        out.method = "exact";
        return out;
    }

    double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = dn1 + dn2;
    double mu = dn1 * dn2 / 2.0;
    std::map<double, size_t> groups;
    for (double v : pooled) ++groups[v];
    double tie_sum = 0.0;
    for (auto& [value, t] : groups) {
        (void)value;
        double td = static_cast<double>(t);
        tie_sum += td * td * td - td;
    }
    double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
    if (var <= 0.0) {
        out.method = "degenerate";
        out.p_value = 1.0;
        return out;
    }
    double cc = u1 > mu ? -0.5 : (u1 < mu ? 0.5 : 0.0);
    double z = (u1 - mu + cc) / std::sqrt(var);
    out.p_value = alt == Alternative::two_sided ? 2.0 * normal_sf(std::fabs(z))
                  : alt == Alternative::greater ? normal_sf(z)
                                                : normal_cdf(z);
    out.p_value = std::min(1.0, out.p_value);
    out.method = "normal_approx";
    return out;
}

// ---- multiplicity ------------------------------------------------------------

struct MultiplicityResult {
    std::vector<double> adjusted;  // same order as the input p-values
    std::vector<char> reject;
};

inline MultiplicityResult holm(const std::vector<double>& pvals, double alpha = 0.05) {
    const size_t m = pvals.size();
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return pvals[a] < pvals[b]; });
    MultiplicityResult out;
    out.adjusted.assign(m, 1.0);
    out.reject.assign(m, 0);
    double running = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double adj = static_cast<double>(m - i) * pvals[order[i]];
        running = std::max(running, std::min(1.0, adj));
        out.adjusted[order[i]] = running;
        out.reject[order[i]] = running <= alpha ? 1 : 0;
    }
    return out;
}

inline MultiplicityResult bonferroni(const std::vector<double>& pvals, double alpha = 0.05) {
    const size_t m = pvals.size();
    MultiplicityResult out;
    out.adjusted.assign(m, 1.0);
    out.reject.assign(m, 0);
    for (size_t i = 0; i < m; ++i) {
        out.adjusted[i] = std::min(1.0, static_cast<double>(m) * pvals[i]);
        out.reject[i] = out.adjusted[i] <= alpha ? 1 : 0;
    }
    return out;
}

// ---- least squares -----------------------------------------------------------

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> se_classical, se_hc1, se_hc3;
    std::vector<double> residuals, fitted;
    detail::Matrix xtx_inv;
    double sigma2 = 0.0;
    size_t n = 0, p = 0;
    std::vector<std::string> names;
};

inline OlsFit ols(const detail::Matrix& X, const std::vector<double>& y,
                  std::vector<std::string> names = {}) {
    const size_t n = X.rows, p = X.cols;
    if (n != y.size()) throw ValidationError("ols: X and y row counts differ");
    if (n <= p) throw ValidationError("ols: need more rows than columns");

    detail::Matrix xt = detail::transpose(X);
    detail::Matrix xtx = detail::matmul(xt, X);
    detail::Matrix xtx_inv = detail::invert(xtx);
    std::vector<double> xty = detail::matvec(xt, y);
    std::vector<double> beta = detail::matvec(xtx_inv, xty);

    OlsFit fit;
    fit.beta = beta;
    fit.n = n;
    fit.p = p;
    fit.names = std::move(names);
    fit.fitted = detail::matvec(X, beta);
    fit.residuals.resize(n);
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - fit.fitted[i];
        rss += fit.residuals[i] * fit.residuals[i];
    }
    fit.sigma2 = rss / static_cast<double>(n - p);
    fit.xtx_inv = xtx_inv;

    fit.se_classical.resize(p);
    for (size_t j = 0; j < p; ++j)
        fit.se_classical[j] = std::sqrt(fit.sigma2 * xtx_inv(j, j));

    // sandwich estimators share the bread; the meat differs by weighting
    auto sandwich = [&](const std::vector<double>& w2) {
        detail::Matrix meat(p, p);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < p; ++j)
                for (size_t k = 0; k < p; ++k) meat(j, k) += w2[i] * X(i, j) * X(i, k);
        detail::Matrix cov = detail::matmul(detail::matmul(xtx_inv, meat), xtx_inv);
        std::vector<double> se(p);
        for (size_t j = 0; j < p; ++j) se[j] = std::sqrt(cov(j, j));
        return se;
    };

    std::vector<double> leverage(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double h = 0.0;
        for (size_t j = 0; j < p; ++j)
            for (size_t k = 0; k < p; ++k) h += X(i, j) * xtx_inv(j, k) * X(i, k);
        leverage[i] = h;
    }

    std::vector<double> w_hc1(n), w_hc3(n);
    double hc1_scale = static_cast<double>(n) / static_cast<double>(n - p);
    for (size_t i = 0; i < n; ++i) {
        double e2 = fit.residuals[i] * fit.residuals[i];
        w_hc1[i] = hc1_scale * e2;
        double denom = 1.0 - leverage[i];
        if (denom < 1e-12) denom = 1e-12;
        w_hc3[i] = e2 / (denom * denom);
    }
    fit.se_hc1 = sandwich(w_hc1);
    fit.se_hc3 = sandwich(w_hc3);
    return fit;
}

// CR1 cluster-robust standard errors for an existing fit.
inline std::vector<double> cluster_se(const OlsFit& fit, const detail::Matrix& X,
                                      const std::vector<int>& cluster) {
    const size_t n = X.rows, p = X.cols;
    if (cluster.size() != n) throw ValidationError("cluster label count mismatch");
    std::map<int, std::vector<double>> scores;  // cluster -> X_g' e_g
    for (size_t i = 0; i < n; ++i) {
        auto& s = scores[cluster[i]];
        if (s.empty()) s.assign(p, 0.0);
        for (size_t j = 0; j < p; ++j) s[j] += X(i, j) * fit.residuals[i];
    }
    const double g = static_cast<double>(scores.size());
    if (g < 2.0) throw ValidationError("cluster_se needs at least 2 clusters");
    detail::Matrix meat(p, p);
    for (auto& [id, s] : scores) {
        (void)id;
        for (size_t j = 0; j < p; ++j)
            for (size_t k = 0; k < p; ++k) meat(j, k) += s[j] * s[k];
    }
    double factor = (g / (g - 1.0)) * (static_cast<double>(n - 1) / static_cast<double>(n - p));
    detail::Matrix cov = detail::matmul(detail::matmul(fit.xtx_inv, meat), fit.xtx_inv);
    std::vector<double> se(p);
    for (size_t j = 0; j < p; ++j) se[j] = std::sqrt(factor * cov(j, j));
    return se;
}

// ---- logistic regression -------------------------------------------------------

struct LogitFit {
    std::vector<double> beta, se;
    bool converged = false;
    bool separation = false;
    int iterations = 0;
    size_t n = 0;
};

// IRLS with the convergence rule fixed by the analysis plan: stop when the
// largest coefficient step drops below 1e-10, give up after 100 iterations.
// A runaway coefficient norm is reported as (quasi-)separation rather than
// silently returned as a huge finite estimate.
inline LogitFit logit(const detail::Matrix& X, const std::vector<int>& y, int max_iter = 100,
                      double tol = 1e-10) {
    const size_t n = X.rows, p = X.cols;
    if (y.size() != n) throw ValidationError("logit: X and y row counts differ");
    LogitFit fit;
    fit.n = n;
    fit.beta.assign(p, 0.0);

    detail::Matrix xtwx(p, p);
    for (int iter = 1; iter <= max_iter; ++iter) {
        fit.iterations = iter;
        std::vector<double> eta(n), mu(n), w(n), z(n);
        for (size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (size_t j = 0; j < p; ++j) e += X(i, j) * fit.beta[j];
            eta[i] = e;
            mu[i] = 1.0 / (1.0 + std::exp(-e));
            w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-12);
            z[i] = eta[i] + (static_cast<double>(y[i]) - mu[i]) / w[i];
        }
        for (size_t j = 0; j < p; ++j)
            for (size_t k = 0; k < p; ++k) {
                double v = 0.0;
                for (size_t i = 0; i < n; ++i) v += X(i, j) * w[i] * X(i, k);
                xtwx(j, k) = v;
            }
        std::vector<double> xtwz(p, 0.0);
        for (size_t j = 0; j < p; ++j)
            for (size_t i = 0; i < n; ++i) xtwz[j] += X(i, j) * w[i] * z[i];
        std::vector<double> next = detail::matvec(detail::invert(xtwx), xtwz);

        double max_step = 0.0, max_beta = 0.0;
        for (size_t j = 0; j < p; ++j) {
            max_step = std::max(max_step, std::fabs(next[j] - fit.beta[j]));
            max_beta = std::max(max_beta, std::fabs(next[j]));
        }
        fit.beta = std::move(next);
        if (max_beta > 30.0) {
            fit.separation = true;
            break;
        }
        if (max_step < tol) {
            fit.converged = true;
            break;
        }
    }

    detail::Matrix cov = detail::invert(xtwx);
    fit.se.resize(p);
    for (size_t j = 0; j < p; ++j) fit.se[j] = std::sqrt(cov(j, j));
    return fit;
}

// Wald interval for an odds ratio: built on the log scale, exponentiated.
inline Interval odds_ratio_ci(double beta, double se, double confidence = 0.95) {
    double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    return {std::exp(beta - z * se), std::exp(beta + z * se)};
}

// ---- association -----------------------------------------------------------------

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("pearson_r input mismatch");
    double mx = mean(x), my = mean(y), sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson_r on constant sample");
    return sxy / std::sqrt(sxx * syy);
}

inline Interval fisher_z_ci(double r, size_t n, double confidence = 0.95) {
    if (n < 4) throw ValidationError("fisher_z_ci needs n >= 4");
    if (!(r > -1.0 && r < 1.0)) throw ValidationError("fisher_z_ci needs |r| < 1");
    double z = std::atanh(r), se = 1.0 / std::sqrt(static_cast<double>(n - 3));
    double q = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    return {std::tanh(z - q * se), std::tanh(z + q * se)};
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson_r(average_ranks(x), average_ranks(y));
}

// Cohen's kappa from a square agreement-count matrix (rows: rater A, cols: rater B).
inline double cohen_kappa(const std::vector<std::vector<double>>& counts) {
    size_t k = counts.size();
    if (k < 2) throw ValidationError("cohen_kappa needs at least a 2x2 table");
    double total = 0.0, agree = 0.0;
    std::vector<double> row(k, 0.0), col(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
        if (counts[i].size() != k) throw ValidationError("cohen_kappa table must be square");
        for (size_t j = 0; j < k; ++j) {
            total += counts[i][j];
            row[i] += counts[i][j];
            col[j] += counts[i][j];
        }
        agree += counts[i][i];
    }
    if (total == 0.0) throw ValidationError("cohen_kappa on empty table");
    double po = agree / total, pe = 0.0;
    for (size_t i = 0; i < k; ++i) pe += row[i] * col[i] / (total * total);
    if (pe == 1.0) throw ValidationError("cohen_kappa undefined at pe == 1");
    return (po - pe) / (1.0 - pe);
}

}  // namespace frontier_audit::stats
