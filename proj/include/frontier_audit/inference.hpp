#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capability_table.hpp"
#include "detail/linalg.hpp"
#include "errors.hpp"
#include "frontier.hpp"
#include "gap.hpp"
#include "paper_record.hpp"
#include "rng.hpp"
#include "stats.hpp"

// The pre-registered analysis battery. Everything that draws randomness is
// addressed through SeededRng replicates, so a fixed seed reproduces every
// bootstrap, permutation, and simulation bit-for-bit at any thread count.
namespace frontier_audit::inference {

struct TooFewClusters : Error {
    using Error::Error;
};
struct MissingClass : Error {
    using Error::Error;
};
struct DegenerateConfusion : Error {
    using Error::Error;
};
struct ProductTooLarge : Error {
    using Error::Error;
};

// Disjoint replicate ranges per consumer, so adding draws to one procedure
// never shifts another procedure's stream.
constexpr std::uint64_t kReplicateH1 = 1'000'000;
constexpr std::uint64_t kReplicateH3 = 2'000'000;
constexpr std::uint64_t kReplicateH6 = 3'000'000;
constexpr std::uint64_t kReplicateH2 = 4'000'000;
constexpr std::uint64_t kReplicateGate = 5'000'000;
constexpr std::uint64_t kReplicateShare = 6'000'000;
constexpr std::uint64_t kReplicatePermutation = 7'000'000;

// ---- gold-standard confusion handling ---------------------------------------

// counts[gold][observed]. The prior over gold classes is taken from the gold
// marginals, which makes the posterior for a given observed label exactly the
// column-normalised counts.
struct ConfusionMatrix {
    std::vector<std::vector<double>> counts;

    size_t classes() const { return counts.size(); }

    double total() const {
        double t = 0.0;
        for (const auto& row : counts)
            for (double c : row) t += c;
        return t;
    }

    void validate() const {
        const size_t k = counts.size();
        if (k < 2) throw DegenerateConfusion("confusion matrix needs at least 2 classes");
        for (const auto& row : counts) {
            if (row.size() != k) throw DegenerateConfusion("confusion matrix must be square");
            double sum = 0.0;
            for (double c : row) {
                if (c < 0.0) throw DegenerateConfusion("confusion matrix has a negative count");
                sum += c;
            }
            if (sum <= 0.0)
                throw DegenerateConfusion("confusion matrix has an unrepresented gold class");
        }
    }

    static ConfusionMatrix identity(size_t k, double per_class = 1.0) {
        ConfusionMatrix m;
        m.counts.assign(k, std::vector<double>(k, 0.0));
        for (size_t i = 0; i < k; ++i) m.counts[i][i] = per_class;
        return m;
    }

    // P(gold | observed = j), Bayes rule with the gold-marginal prior.
    std::vector<double> posterior_given_observed(size_t j) const {
        const size_t k = classes();
        if (j >= k) throw DegenerateConfusion("observed class index out of range");
        double col = 0.0;
        for (size_t g = 0; g < k; ++g) col += counts[g][j];
        if (col <= 0.0)
            throw DegenerateConfusion("observed label never occurs in the gold sample");
        std::vector<double> post(k);
        for (size_t g = 0; g < k; ++g) post[g] = counts[g][j] / col;
        return post;
    }
};

// ---- the per-paper analysis row ----------------------------------------------

struct GapObservation {
    double gap = 0.0;
    std::optional<double> tier_gap;
    std::optional<Valence> valence;
    Domain domain = Domain::other;
    int year = 0;
    std::string journal;
};

inline GapObservation observe(const PaperRecord& paper, const GapVector& gap) {
    GapObservation o;
    o.gap = gap.temporal_gap;
    o.tier_gap = gap.tier_gap;
    o.valence = paper.conclusion_valence;
    o.domain = paper.domain;
    o.year = paper.publication_year();
    o.journal = paper.journal;
    return o;
}

inline std::vector<GapObservation> collect_observations(
    const std::vector<PaperRecord>& papers, const std::vector<std::optional<GapVector>>& gaps) {
    if (papers.size() != gaps.size())
        throw ValidationError("papers and gap vectors must line up one-to-one");
    std::vector<GapObservation> out;
    for (size_t i = 0; i < papers.size(); ++i)
        if (gaps[i]) out.push_back(observe(papers[i], *gaps[i]));
    return out;
}

// ---- report container ----------------------------------------------------------

struct HypothesisReport {
    std::string id;
    double estimate = 0.0;
    stats::Interval ci;
    std::optional<double> p;
    std::optional<bool> post_holm_reject;
    size_t n = 0;
    std::map<std::string, std::string> spec_tags;
};

// ---- bootstrap plumbing ---------------------------------------------------------

// Percentile CI over B replicate estimates. The replicate callback owns its
// resampling and may return nullopt to discard a draw (singular refit, lost
// class); discards are deterministic for a fixed seed.
inline stats::Interval bootstrap_percentile_ci(
    size_t B, std::uint64_t replicate_base, const SeededRng& rng,
    const std::function<std::optional<double>(SeededRng::Stream&)>& replicate,
    double confidence = 0.95) {
    if (B == 0) throw ValidationError("bootstrap needs at least one replicate");
    std::vector<double> estimates;
    estimates.reserve(B);
    for (size_t b = 0; b < B; ++b) {
        auto stream = rng.stream(replicate_base + b);
        if (auto est = replicate(stream)) estimates.push_back(*est);
    }
    if (estimates.empty()) throw ValidationError("every bootstrap replicate failed");
    double alpha = 1.0 - confidence;
    return {stats::percentile_nearest_rank(estimates, alpha / 2.0),
            stats::percentile_nearest_rank(estimates, 1.0 - alpha / 2.0)};
}

inline std::vector<size_t> resample_indices(SeededRng::Stream& stream, size_t n) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = stream.index(n);
    return idx;
}

// ---- H1 / H3: location tests -----------------------------------------------------

inline HypothesisReport location_report(const std::string& id, const std::vector<double>& values,
                                        size_t B, std::uint64_t replicate_base,
                                        const SeededRng& rng) {
    HypothesisReport r;
    r.id = id;
    r.n = values.size();
    r.spec_tags = {{"test", "wilcoxon_signed_rank"},
                   {"side", "greater"},
                   {"ci", "bootstrap_percentile"},
                   {"B", std::to_string(B)}};
    stats::TestResult w = stats::wilcoxon_signed_rank(values, stats::Alternative::greater);
    r.estimate = w.effect;
    r.p = w.p_value;
    r.spec_tags["method"] = w.method;
    if (values.empty()) return r;
    r.ci = bootstrap_percentile_ci(
        B, replicate_base, rng, [&](SeededRng::Stream& s) -> std::optional<double> {
            std::vector<double> draw(values.size());
            for (double& v : draw) v = values[s.index(values.size())];
            return stats::median(draw);
        });
    return r;
}

inline HypothesisReport h1_location(const std::vector<GapObservation>& rows, size_t B,
                                    const SeededRng& rng) {
    std::vector<double> gaps;
    gaps.reserve(rows.size());
    for (const auto& r : rows) gaps.push_back(r.gap);
    return location_report("H1", gaps, B, kReplicateH1, rng);
}

inline HypothesisReport h3_tier_lag(const std::vector<GapObservation>& rows, size_t B,
                                    const SeededRng& rng) {
    std::vector<double> dyads;
    for (const auto& r : rows)
        if (r.tier_gap) dyads.push_back(*r.tier_gap);
    return location_report("H3", dyads, B, kReplicateH3, rng);
}

// ---- regression designs -----------------------------------------------------------

// Years enter centred at a fixed constant so the design stays well
// conditioned without depending on the sample.
constexpr double kYearCenter = 2024.0;

enum class ValenceEncoding : unsigned char { categorical, numeric_linear };
enum class H6Estimator : unsigned char { cluster_ols, random_intercept };

inline std::string_view valence_encoding_name(ValenceEncoding e) {
    return e == ValenceEncoding::categorical ? "categorical" : "numeric_linear";
}
inline std::string_view h6_estimator_name(H6Estimator e) {
    return e == H6Estimator::cluster_ols ? "cluster_ols" : "random_intercept";
}

struct RegressionDesign {
    detail::Matrix X;
    std::vector<double> y;
    std::vector<int> cluster;
    std::vector<std::string> names;
    size_t year_col = 0;
    std::map<Domain, size_t> interaction_col;  // absent for the reference domain
    std::map<Domain, size_t> domain_n;
    size_t contrast_col = 0;       // H6 designs only
    double contrast_scale = 1.0;   // maps the coefficient to negative-vs-positive
};

inline std::vector<Domain> present_domains(const std::vector<GapObservation>& rows) {
    std::set<Domain> seen;
    for (const auto& r : rows) seen.insert(r.domain);
    std::vector<Domain> out;
    for (Domain d : kAllDomains)
        if (seen.count(d)) out.push_back(d);
    return out;
}

inline std::vector<int> journal_ids(const std::vector<GapObservation>& rows) {
    std::map<std::string, int> ids;
    for (const auto& r : rows) ids.emplace(r.journal, 0);
    int next = 0;
    for (auto& [name, id] : ids) {
        (void)name;
        id = next++;
    }
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(ids.at(r.journal));
    return out;
}

// gap ~ year + domain + domain:year, treatment-coded on the first present
// domain. Optionally prepends a valence block for the H6 contrast.
inline RegressionDesign build_gap_design(const std::vector<GapObservation>& rows,
                                         std::optional<ValenceEncoding> valence) {
    if (rows.empty()) throw ValidationError("regression on an empty corpus");
    std::vector<const GapObservation*> used;
    for (const auto& r : rows)
        if (!valence || r.valence) used.push_back(&r);
    if (used.empty()) throw MissingClass("no rows carry a valence label");

    RegressionDesign d;

    std::vector<Valence> valence_levels;  // non-reference levels, positive is reference
    if (valence) {
        std::set<Valence> seen;
        for (const auto* r : used) seen.insert(*r->valence);
        if (*valence == ValenceEncoding::categorical) {
            if (!seen.count(Valence::negative) || !seen.count(Valence::positive))
                throw MissingClass("contrast needs both negative and positive valence papers");
            for (Valence v : {Valence::negative, Valence::mixed, Valence::neutral})
                if (seen.count(v)) valence_levels.push_back(v);
        } else if (seen.size() < 2) {
            throw MissingClass("numeric valence encoding needs at least two classes");
        }
    }

    std::vector<GapObservation> slice;
    slice.reserve(used.size());
    for (const auto* r : used) slice.push_back(*r);
    std::vector<Domain> domains = present_domains(slice);
    const Domain reference = domains.front();

    size_t p = 2;  // intercept + year
    p += valence ? (*valence == ValenceEncoding::categorical ? valence_levels.size() : 1) : 0;
    p += (domains.size() - 1) * 2;

    const size_t n = used.size();
    d.X = detail::Matrix(n, p);
    d.y.resize(n);
    d.names.assign(p, "");
    d.cluster = journal_ids(slice);

    size_t col = 0;
    d.names[col++] = "intercept";
    if (valence) {
        d.contrast_col = col;
        if (*valence == ValenceEncoding::categorical) {
            d.contrast_scale = 1.0;  // coefficient on the negative dummy
            for (Valence v : valence_levels) d.names[col++] = std::string(valence_name(v));
        } else {
            // estimate reported as the contrast at the class scores:
            // numeric(negative) - numeric(positive) = -2
            d.contrast_scale = -2.0;
            d.names[col++] = "valence_numeric";
        }
    }
    d.year_col = col;
    d.names[col++] = "year";
    std::map<Domain, size_t> dummy_col;
    for (size_t i = 1; i < domains.size(); ++i) {
        dummy_col[domains[i]] = col;
        d.names[col++] = std::string(domain_name(domains[i]));
    }
    for (size_t i = 1; i < domains.size(); ++i) {
        d.interaction_col[domains[i]] = col;
        d.names[col++] = std::string(domain_name(domains[i])) + ":year";
    }

    for (size_t i = 0; i < n; ++i) {
        const GapObservation& r = *used[i];
        d.y[i] = r.gap;
        ++d.domain_n[r.domain];
        double year_c = static_cast<double>(r.year) - kYearCenter;
        d.X(i, 0) = 1.0;
        if (valence) {
            if (*valence == ValenceEncoding::categorical) {
                for (size_t v = 0; v < valence_levels.size(); ++v)
                    d.X(i, d.contrast_col + v) = *r.valence == valence_levels[v] ? 1.0 : 0.0;
            } else {
                d.X(i, d.contrast_col) = valence_numeric(*r.valence);
            }
        }
        d.X(i, d.year_col) = year_c;
        if (r.domain != reference) {
            d.X(i, dummy_col.at(r.domain)) = 1.0;
            d.X(i, d.interaction_col.at(r.domain)) = year_c;
        }
    }
    return d;
}

// ---- H2: pooled year-on-year slope -------------------------------------------------

// n-weighted mean of the per-domain slopes implied by the interaction fit.
// Returns nullopt when the slice cannot identify a slope (single year,
// singular design, too few rows).
inline std::optional<double> pooled_slope_point(const std::vector<GapObservation>& rows) {
    std::set<int> years;
    for (const auto& r : rows) years.insert(r.year);
    if (years.size() < 2) return std::nullopt;
    try {
        RegressionDesign d = build_gap_design(rows, std::nullopt);
        if (d.X.rows <= d.X.cols) return std::nullopt;
        stats::OlsFit fit = stats::ols(d.X, d.y);
        double pooled = 0.0, total = 0.0;
        for (const auto& [domain, n_d] : d.domain_n) {
            double slope = fit.beta[d.year_col];
            auto it = d.interaction_col.find(domain);
            if (it != d.interaction_col.end()) slope += fit.beta[it->second];
            pooled += static_cast<double>(n_d) * slope;
            total += static_cast<double>(n_d);
        }
        return pooled / total;
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

inline HypothesisReport h2_pooled_slope(const std::vector<GapObservation>& rows, size_t B,
                                        const SeededRng& rng) {
    std::set<std::string> journals;
    std::set<int> years;
    for (const auto& r : rows) {
        journals.insert(r.journal);
        years.insert(r.year);
    }
    if (journals.size() < 2)
        throw TooFewClusters("pooled slope needs at least 2 journal clusters");
    if (years.size() < 2) throw TooFewClusters("pooled slope needs at least 2 distinct years");

    auto point = pooled_slope_point(rows);
    if (!point) throw ValidationError("pooled slope is not identified on this corpus");

    std::map<std::string, std::vector<size_t>> by_journal;
    for (size_t i = 0; i < rows.size(); ++i) by_journal[rows[i].journal].push_back(i);
    std::vector<const std::vector<size_t>*> clusters;
    for (const auto& [name, members] : by_journal) {
        (void)name;
        clusters.push_back(&members);
    }

    HypothesisReport r;
    r.id = "H2";
    r.n = rows.size();
    r.estimate = *point;
    r.ci = bootstrap_percentile_ci(
        B, kReplicateH2, rng, [&](SeededRng::Stream& s) -> std::optional<double> {
            std::vector<GapObservation> draw;
            draw.reserve(rows.size());
            for (size_t c = 0; c < clusters.size(); ++c)
                for (size_t i : *clusters[s.index(clusters.size())]) draw.push_back(rows[i]);
            return pooled_slope_point(draw);
        });
    r.spec_tags = {{"ci", "cluster_bootstrap_percentile"},
                   {"B", std::to_string(B)},
                   {"clusters", std::to_string(clusters.size())},
                   {"falsifier_triggered", r.ci.hi < 0.0 ? "true" : "false"}};
    return r;
}

// ---- H6: valence asymmetry -----------------------------------------------------------

// Contrast point estimate (negative vs positive valence) under the fixed
// effects approximation; shared by the bootstrap and the measurement-error
// gate.
inline std::optional<double> h6_contrast_point(const std::vector<GapObservation>& rows,
                                               ValenceEncoding encoding) {
    try {
        RegressionDesign d = build_gap_design(rows, encoding);
        if (d.X.rows <= d.X.cols) return std::nullopt;
        stats::OlsFit fit = stats::ols(d.X, d.y);
        return d.contrast_scale * fit.beta[d.contrast_col];
    } catch (const MissingClass&) {
        return std::nullopt;
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

// Single-variance-component random intercept, fit by profile maximum
// likelihood over the variance ratio. For a given ratio the GLS transform is
// per-cluster partial demeaning, so each profile point is one OLS.
struct RandomInterceptFit {
    std::vector<double> beta;
    std::vector<double> se;
    double lambda = 0.0;  // cluster variance over residual variance
    size_t n = 0;
};

inline RandomInterceptFit fit_random_intercept(const detail::Matrix& X,
                                               const std::vector<double>& y,
                                               const std::vector<int>& cluster) {
    const size_t n = X.rows, p = X.cols;
    if (cluster.size() != n) throw ValidationError("cluster label count mismatch");
    std::map<int, std::vector<size_t>> groups;
    for (size_t i = 0; i < n; ++i) groups[cluster[i]].push_back(i);

    auto profile = [&](double lambda) {
        detail::Matrix Xt(n, p);
        std::vector<double> yt(n);
        double log_det = 0.0;
        for (const auto& [id, members] : groups) {
            (void)id;
            const double m = static_cast<double>(members.size());
            const double theta = 1.0 - 1.0 / std::sqrt(1.0 + m * lambda);
            log_det += std::log(1.0 + m * lambda);
            double ybar = 0.0;
            std::vector<double> xbar(p, 0.0);
            for (size_t i : members) {
                ybar += y[i];
                for (size_t j = 0; j < p; ++j) xbar[j] += X(i, j);
            }
            ybar /= m;
            for (double& v : xbar) v /= m;
            for (size_t i : members) {
                yt[i] = y[i] - theta * ybar;
                for (size_t j = 0; j < p; ++j) Xt(i, j) = X(i, j) - theta * xbar[j];
            }
        }
        stats::OlsFit fit = stats::ols(Xt, yt);
        double rss = 0.0;
        for (double e : fit.residuals) rss += e * e;
        double neg2ll = static_cast<double>(n) * std::log(rss / static_cast<double>(n)) + log_det;
        return std::make_pair(neg2ll, std::move(fit));
    };

    // coarse log-spaced grid, then two local refinements around the best point
    std::vector<double> candidates = {0.0};
    for (int i = -80; i <= 40; ++i) candidates.push_back(std::pow(10.0, i / 10.0));
    double best_lambda = 0.0, best_obj = std::numeric_limits<double>::infinity();
    for (double lam : candidates) {
        double obj = profile(lam).first;
        if (obj < best_obj) {
            best_obj = obj;
            best_lambda = lam;
        }
    }
    for (int round = 0; round < 2; ++round) {
        double lo = best_lambda / 3.0, hi = best_lambda * 3.0;
        if (best_lambda == 0.0) hi = 1e-8;
        for (int i = 0; i <= 20; ++i) {
            double lam = lo + (hi - lo) * i / 20.0;
            double obj = profile(lam).first;
            if (obj < best_obj) {
                best_obj = obj;
                best_lambda = lam;
            }
        }
    }

    stats::OlsFit fit = profile(best_lambda).second;
    RandomInterceptFit out;
    out.beta = fit.beta;
    out.se = fit.se_classical;
    out.lambda = best_lambda;
    out.n = n;
    return out;
}

struct ConfirmatoryConfig {
    double alpha = 0.05;
    size_t bootstrap_B = 1500;
    H6Estimator estimator = H6Estimator::cluster_ols;
    ValenceEncoding encoding = ValenceEncoding::categorical;
    size_t gate_B = 1000;
    double gate_threshold = 0.90;
};

inline HypothesisReport h6_valence_model(const std::vector<GapObservation>& rows,
                                         const ConfirmatoryConfig& cfg, const SeededRng& rng) {
    RegressionDesign d = build_gap_design(rows, cfg.encoding);
    std::set<int> clusters(d.cluster.begin(), d.cluster.end());
    if (clusters.size() < 2)
        throw TooFewClusters("valence model needs at least 2 journal clusters");
    if (d.X.rows <= d.X.cols)
        throw ValidationError("valence model has more columns than rows");

    HypothesisReport r;
    r.id = "H6";
    r.n = d.X.rows;
    r.spec_tags = {{"estimator", std::string(h6_estimator_name(cfg.estimator))},
                   {"encoding", std::string(valence_encoding_name(cfg.encoding))},
                   {"contrast", "negative_vs_positive"},
                   {"B", std::to_string(cfg.bootstrap_B)},
                   {"clusters", std::to_string(clusters.size())}};

    if (cfg.estimator == H6Estimator::cluster_ols) {
        stats::OlsFit fit = stats::ols(d.X, d.y, d.names);
        std::vector<double> se = stats::cluster_se(fit, d.X, d.cluster);
        r.estimate = d.contrast_scale * fit.beta[d.contrast_col];
        double se_c = std::fabs(d.contrast_scale) * se[d.contrast_col];
        double z = se_c > 0.0 ? r.estimate / se_c : 0.0;
        r.p = std::min(1.0, 2.0 * stats::normal_sf(std::fabs(z)));

        // journal-cluster bootstrap on the contrast
        std::map<int, std::vector<size_t>> by_cluster;
        std::vector<GapObservation> used;
        for (const auto& row : rows)
            if (row.valence) used.push_back(row);
        for (size_t i = 0; i < used.size(); ++i)
            by_cluster[d.cluster[i]].push_back(i);
        std::vector<const std::vector<size_t>*> pool;
        for (const auto& [id, members] : by_cluster) {
            (void)id;
            pool.push_back(&members);
        }
        r.ci = bootstrap_percentile_ci(
            cfg.bootstrap_B, kReplicateH6, rng,
            [&](SeededRng::Stream& s) -> std::optional<double> {
                std::vector<GapObservation> draw;
                draw.reserve(used.size());
                for (size_t c = 0; c < pool.size(); ++c)
                    for (size_t i : *pool[s.index(pool.size())]) draw.push_back(used[i]);
                return h6_contrast_point(draw, cfg.encoding);
            });
    } else {
        RandomInterceptFit fit = fit_random_intercept(d.X, d.y, d.cluster);
        r.estimate = d.contrast_scale * fit.beta[d.contrast_col];
        double se_c = std::fabs(d.contrast_scale) * fit.se[d.contrast_col];
        double z = se_c > 0.0 ? r.estimate / se_c : 0.0;
        r.p = std::min(1.0, 2.0 * stats::normal_sf(std::fabs(z)));
        double q = stats::normal_quantile(0.975);
        r.ci = {r.estimate - q * se_c, r.estimate + q * se_c};
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", fit.lambda);
        r.spec_tags["variance_ratio"] = buf;
    }
    return r;
}

// ---- measurement-error simulation ------------------------------------------------

struct DirectionGate {
    double observed = 0.0;
    double fraction = 0.0;
    size_t draws_used = 0;
};

// Resamples each paper's valence from the confusion posterior conditional on
// its observed label, recomputes the contrast, and reports the fraction of
// draws whose sign matches the point estimate.
inline DirectionGate measurement_error_sim(
    const std::vector<GapObservation>& rows,
    const std::function<std::optional<double>(const std::vector<GapObservation>&)>& contrast,
    const ConfusionMatrix& confusion, size_t B, const SeededRng& rng,
    std::uint64_t replicate_base = kReplicateGate) {
    confusion.validate();
    if (confusion.classes() != 4)
        throw DegenerateConfusion("valence confusion matrix must be 4x4");
    auto observed = contrast(rows);
    if (!observed) throw ValidationError("contrast is undefined on the observed corpus");

    // cache the posterior per observed label
    std::vector<std::vector<double>> posterior(4);
    for (size_t j = 0; j < 4; ++j) posterior[j] = confusion.posterior_given_observed(j);

    auto sign = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
    const int point_sign = sign(*observed);

    DirectionGate gate;
    gate.observed = *observed;
    size_t matches = 0;
    std::vector<GapObservation> draw = rows;
    for (size_t b = 0; b < B; ++b) {
        auto stream = rng.stream(replicate_base + b);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].valence) continue;
            const auto& post = posterior[static_cast<size_t>(*rows[i].valence)];
            double u = stream.uniform(), cum = 0.0;
            size_t g = 3;
            for (size_t c = 0; c < 4; ++c) {
                cum += post[c];
                if (u < cum) {
                    g = c;
                    break;
                }
            }
            draw[i].valence = static_cast<Valence>(g);
        }
        auto est = contrast(draw);
        if (!est) continue;
        ++gate.draws_used;
        if (sign(*est) == point_sign) ++matches;
    }
    gate.fraction = gate.draws_used > 0
                        ? static_cast<double>(matches) / static_cast<double>(gate.draws_used)
                        : 0.0;
    return gate;
}

// ---- the confirmatory family -------------------------------------------------------

struct ConfirmatoryFamily {
    HypothesisReport h1, h3, h6;
    std::optional<double> h6_direction_intact;
};

// H1, H3, H6 under Holm at family-wise alpha. Directional rejections: H1/H3
// additionally need a positive point estimate; H6 needs a positive contrast
// with CI excluding zero and, when a confusion matrix is supplied, the
// measurement-error direction gate.
inline ConfirmatoryFamily run_confirmatory_family(const std::vector<GapObservation>& rows,
                                                  const ConfirmatoryConfig& cfg,
                                                  const SeededRng& rng,
                                                  const ConfusionMatrix* valence_confusion =
                                                      nullptr) {
    ConfirmatoryFamily fam;
    fam.h1 = h1_location(rows, cfg.bootstrap_B, rng);
    fam.h3 = h3_tier_lag(rows, cfg.bootstrap_B, rng);
    fam.h6 = h6_valence_model(rows, cfg, rng);

    stats::MultiplicityResult holm =
        stats::holm({fam.h1.p.value(), fam.h3.p.value(), fam.h6.p.value()}, cfg.alpha);
    fam.h1.post_holm_reject = holm.reject[0] && fam.h1.estimate > 0.0;
    fam.h3.post_holm_reject = holm.reject[1] && fam.h3.estimate > 0.0;

    bool gate_ok = true;
    if (valence_confusion) {
        DirectionGate gate = measurement_error_sim(
            rows,
            [&](const std::vector<GapObservation>& draw) {
                return h6_contrast_point(draw, cfg.encoding);
            },
            *valence_confusion, cfg.gate_B, rng);
        fam.h6_direction_intact = gate.fraction;
        gate_ok = gate.fraction >= cfg.gate_threshold;
    }
    fam.h6.post_holm_reject =
        holm.reject[2] && fam.h6.estimate > 0.0 && fam.h6.ci.lo > 0.0 && gate_ok;
    return fam;
}

// ---- Bayes-corrected class-level share ----------------------------------------------

enum class BayesMode : unsigned char { marginal_posterior, threshold_indicator, expected_value };

inline std::string_view bayes_mode_name(BayesMode m) {
    switch (m) {
        case BayesMode::marginal_posterior:
            return "marginal_posterior";
        case BayesMode::threshold_indicator:
            return "threshold_indicator";
        case BayesMode::expected_value:
            return "expected_value";
    }
    return "?";
}

struct ShareReport {
    double share = 0.0;
    stats::Interval ci;
    size_t n = 0;
    BayesMode mode = BayesMode::marginal_posterior;
};

inline double share_from_posteriors(const std::vector<double>& post_ai, BayesMode mode) {
    double sum = 0.0;
    for (double p : post_ai)
        sum += (mode == BayesMode::threshold_indicator) ? (p > 0.5 ? 1.0 : 0.0) : p;
    return sum / static_cast<double>(post_ai.size());
}

// Corrected share of ai_generic framings. Per-paper posteriors come from the
// gold confusion matrix; the CI bootstraps jointly over papers and over the
// confusion counts (multinomial).
inline ShareReport bayes_corrected_share(const std::vector<Framing>& observed,
                                         const ConfusionMatrix& confusion, BayesMode mode,
                                         size_t B, const SeededRng& rng) {
    if (observed.empty()) throw ValidationError("no observed framings");
    confusion.validate();
    if (confusion.classes() != 2)
        throw DegenerateConfusion("framing confusion matrix must be 2x2");

    auto posteriors = [](const ConfusionMatrix& m,
                         const std::vector<Framing>& labels) -> std::vector<double> {
        std::array<std::vector<double>, 2> by_label = {m.posterior_given_observed(0),
                                                       m.posterior_given_observed(1)};
        std::vector<double> post;
        post.reserve(labels.size());
        constexpr size_t ai = static_cast<size_t>(Framing::ai_generic);
        for (Framing f : labels) post.push_back(by_label[static_cast<size_t>(f)][ai]);
        return post;
    };

    ShareReport out;
    out.n = observed.size();
    out.mode = mode;
    out.share = share_from_posteriors(posteriors(confusion, observed), mode);

    // flatten the confusion for multinomial resampling
    const double total = confusion.total();
    const auto gold_n = static_cast<size_t>(std::llround(total));
    std::array<double, 4> cell_p{};
    for (size_t g = 0; g < 2; ++g)
        for (size_t o = 0; o < 2; ++o) cell_p[g * 2 + o] = confusion.counts[g][o] / total;

    out.ci = bootstrap_percentile_ci(
        B, kReplicateShare, rng, [&](SeededRng::Stream& s) -> std::optional<double> {
            std::vector<Framing> labels(observed.size());
            for (auto& f : labels) f = observed[s.index(observed.size())];
            ConfusionMatrix m;
            m.counts.assign(2, std::vector<double>(2, 0.0));
            for (size_t i = 0; i < gold_n; ++i) {
                double u = s.uniform(), cum = 0.0;
                size_t cell = 3;
                for (size_t c = 0; c < 4; ++c) {
                    cum += cell_p[c];
                    if (u < cum) {
                        cell = c;
                        break;
                    }
                }
                m.counts[cell / 2][cell % 2] += 1.0;
            }
            try {
                m.validate();
                return share_from_posteriors(posteriors(m, labels), mode);
            } catch (const DegenerateConfusion&) {
                return std::nullopt;
            }
        });
    return out;
}

// ---- permutation nulls ----------------------------------------------------------------

struct PermutationNull {
    double observed = 0.0;
    std::vector<double> draws;
    double percentile = 1.0;  // share of null draws at or below the observed value
};

template <class Fn>
PermutationNull permutation_null_signflip(const std::vector<double>& xs, Fn&& statistic,
                                          size_t B, const SeededRng& rng,
                                          std::uint64_t replicate_base = kReplicatePermutation) {
    if (B == 0) throw ValidationError("permutation null needs at least one draw");
    PermutationNull out;
    out.observed = statistic(xs);
    out.draws.reserve(B);
    std::vector<double> flipped(xs.size());
    size_t at_or_below = 0;
    for (size_t b = 0; b < B; ++b) {
        auto stream = rng.stream(replicate_base + b);
        for (size_t i = 0; i < xs.size(); ++i)
            flipped[i] = (stream.bits() & 1u) ? -xs[i] : xs[i];
        double v = statistic(flipped);
        out.draws.push_back(v);
        if (v <= out.observed) ++at_or_below;
    }
    out.percentile = static_cast<double>(at_or_below) / static_cast<double>(B);
    return out;
}

template <class Fn>
PermutationNull permutation_null_yearshuffle(const std::vector<GapObservation>& rows,
                                             Fn&& statistic, size_t B, const SeededRng& rng,
                                             std::uint64_t replicate_base =
                                                 kReplicatePermutation) {
    if (B == 0) throw ValidationError("permutation null needs at least one draw");
    PermutationNull out;
    out.observed = statistic(rows);
    out.draws.reserve(B);
    std::vector<GapObservation> draw = rows;
    std::vector<int> years;
    years.reserve(rows.size());
    for (const auto& r : rows) years.push_back(r.year);
    size_t at_or_below = 0;
    for (size_t b = 0; b < B; ++b) {
        auto stream = rng.stream(replicate_base + b);
        std::vector<int> shuffled = years;
        stream.shuffle(shuffled);
        for (size_t i = 0; i < draw.size(); ++i) draw[i].year = shuffled[i];
        double v = statistic(draw);
        out.draws.push_back(v);
        if (v <= out.observed) ++at_or_below;
    }
    out.percentile = static_cast<double>(at_or_below) / static_cast<double>(B);
    return out;
}

// ---- specification curve ----------------------------------------------------------------

struct SpecAxis {
    std::string name;
    std::vector<std::string> levels;  // first level is the primary specification
};

struct SpecCell {
    std::map<std::string, std::string> choice;
    double estimate = 0.0;
    bool reject = false;
};

struct SpecCurveConfig {
    double reject_threshold = 0.75;
    size_t cap = 10'000;
};

struct SpecCurveResult {
    std::vector<SpecCell> cells;
    double reject_fraction = 0.0;
    double p10 = 0.0, p50 = 0.0, p90 = 0.0;
    double primary_estimate = 0.0;
    bool confirmatory = false;
};

// Evaluates the estimate over the full Cartesian product of analytic choices.
// Confirmatory verdict: enough cells reject, and the 10th-percentile effect
// sits on the same side of zero as the primary specification.
inline SpecCurveResult specification_curve(
    const std::vector<SpecAxis>& axes,
    const std::function<std::pair<double, bool>(const std::map<std::string, std::string>&)>&
        evaluate,
    const SpecCurveConfig& cfg = {}) {
    std::set<std::string> names;
    size_t cells = 1;
    for (const auto& axis : axes) {
        if (axis.levels.empty())
            throw ValidationError("specification axis '" + axis.name + "' has no levels");
        if (!names.insert(axis.name).second)
            throw ValidationError("duplicate specification axis '" + axis.name + "'");
        if (cells > cfg.cap / axis.levels.size())
            throw ProductTooLarge("specification grid exceeds the cap of " +
                                  std::to_string(cfg.cap) + " cells");
        cells *= axis.levels.size();
    }

    SpecCurveResult out;
    out.cells.reserve(cells);
    std::vector<size_t> odometer(axes.size(), 0);
    for (size_t c = 0; c < cells; ++c) {
        std::map<std::string, std::string> choice;
        for (size_t a = 0; a < axes.size(); ++a) choice[axes[a].name] = axes[a].levels[odometer[a]];
        auto [estimate, reject] = evaluate(choice);
        out.cells.push_back({std::move(choice), estimate, reject});
        for (size_t a = axes.size(); a-- > 0;) {
            if (++odometer[a] < axes[a].levels.size()) break;
            odometer[a] = 0;
        }
    }

    std::vector<double> estimates;
    estimates.reserve(cells);
    size_t rejects = 0;
    for (const auto& cell : out.cells) {
        estimates.push_back(cell.estimate);
        rejects += cell.reject ? 1 : 0;
    }
    out.reject_fraction = static_cast<double>(rejects) / static_cast<double>(cells);
    out.p10 = stats::percentile_nearest_rank(estimates, 0.10);
    out.p50 = stats::percentile_nearest_rank(estimates, 0.50);
    out.p90 = stats::percentile_nearest_rank(estimates, 0.90);
    out.primary_estimate = out.cells.front().estimate;
    const bool same_side = (out.primary_estimate > 0.0 && out.p10 > 0.0) ||
                           (out.primary_estimate < 0.0 && out.p10 < 0.0);
    out.confirmatory = out.reject_fraction >= cfg.reject_threshold && same_side;
    return out;
}

// ---- lag-default sensitivity grid --------------------------------------------------------

struct LagCell {
    std::optional<long> lag_days;  // nullopt: per-domain median lags
    Scale scale = Scale::eci;
    double h1_median = 0.0;
    std::optional<double> h2_slope;
    std::optional<double> h3_median;
    size_t n = 0;
    size_t n_clipped = 0;
    size_t n_dyads = 0;
    size_t n_extrapolated = 0;
};

// Recomputes every gap vector per (lag, scale) cell and summarises the three
// location outcomes. Papers whose model cannot be resolved or scored are
// skipped cell-wise, mirroring the corpus pipeline.
inline std::vector<LagCell> lag_sweep(const std::vector<PaperRecord>& papers,
                                      const CapabilityTable& table,
                                      const std::map<Scale, FrontierTrajectory>& trajectories,
                                      const std::vector<std::optional<long>>& lags,
                                      const LagMedians* domain_medians = nullptr,
                                      const GapConfig& base = {}) {
    if (papers.empty()) throw ValidationError("lag sweep on an empty corpus");
    std::vector<LagCell> grid;
    for (const auto& [scale, traj] : trajectories) {
        for (const auto& lag : lags) {
            if (!lag && !domain_medians)
                throw ConfigError("domain-specific lag cell needs the median table");
            LagCell cell;
            cell.lag_days = lag;
            cell.scale = scale;
            std::vector<double> gaps;
            std::vector<GapObservation> obs;
            for (const auto& paper : papers) {
                GapConfig cfg = base;
                cfg.scale = scale;
                if (lag) {
                    cfg.lag_days = *lag;
                } else {
                    auto it = domain_medians->find(paper.domain);
                    if (it == domain_medians->end())
                        throw ConfigError("no median lag for domain '" +
                                          std::string(domain_name(paper.domain)) + "'");
                    cfg.lag_days = it->second;
                }
                std::optional<GapVector> gap;
                try {
                    gap = compute_gap(paper, table, traj, cfg);
                } catch (const UnresolvedModel&) {
                    continue;
                } catch (const MissingScore&) {
                    continue;
                }
                ++cell.n;
                gaps.push_back(gap->temporal_gap);
                if (gap->eval_date_source == EvalDateSource::clipped_to_release) ++cell.n_clipped;
                if (gap->tier_gap) ++cell.n_dyads;
                if (gap->frontier_extrapolated) ++cell.n_extrapolated;
                obs.push_back(observe(paper, *gap));
            }
            if (gaps.empty())
                throw ValidationError("lag sweep cell has no usable papers");
            cell.h1_median = stats::median(gaps);
            cell.h2_slope = pooled_slope_point(obs);
            std::vector<double> dyads;
            for (const auto& o : obs)
                if (o.tier_gap) dyads.push_back(*o.tier_gap);
            if (!dyads.empty()) cell.h3_median = stats::median(dyads);
            grid.push_back(std::move(cell));
        }
    }
    return grid;
}

// ---- H10: deployment-frontier rerun --------------------------------------------------------

struct DeploymentRerun {
    ConfirmatoryFamily family;
    std::vector<std::optional<GapVector>> gaps;  // aligned with the input papers
    size_t n_used = 0;
};

// Swaps the price-capped frontier in for the absolute one and reruns the
// confirmatory family on the recomputed gaps.
inline DeploymentRerun h10_deployment_rerun(const std::vector<PaperRecord>& papers,
                                            const CapabilityTable& table, Date start, Date end,
                                            const GapConfig& gap_cfg,
                                            const ConfirmatoryConfig& cfg, const SeededRng& rng,
                                            double price_multiple = 10.0) {
    FrontierQuery query;
    query.variant = FrontierVariant::deployment;
    query.price_multiple = price_multiple;
    FrontierTrajectory traj =
        FrontierTrajectory::build(table, gap_cfg.scale, start, end, query);

    DeploymentRerun out;
    out.gaps.reserve(papers.size());
    for (const auto& paper : papers) {
        try {
            out.gaps.emplace_back(compute_gap(paper, table, traj, gap_cfg));
            ++out.n_used;
        } catch (const UnresolvedModel&) {
            out.gaps.emplace_back(std::nullopt);
        } catch (const MissingScore&) {
            out.gaps.emplace_back(std::nullopt);
        }
    }
    out.family = run_confirmatory_family(collect_observations(papers, out.gaps), cfg, rng);
    for (HypothesisReport* r : {&out.family.h1, &out.family.h3, &out.family.h6})
        r->spec_tags["frontier"] = std::string(frontier_variant_name(FrontierVariant::deployment));
    return out;
}

}  // namespace frontier_audit::inference
