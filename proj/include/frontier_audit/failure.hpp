#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "capability_table.hpp"
#include "detail/csv.hpp"
#include "detail/strings.hpp"
#include "errors.hpp"
#include "gap.hpp"
#include "paper_record.hpp"
#include "stats.hpp"

namespace frontier_audit {

// Kleene three-valued logic. Unknown is "could not be decided from the
// record", and it must never be promoted to a failure.
enum class TriBool : unsigned char { False = 0, True = 1, Unknown = 2 };

constexpr TriBool tri_from(bool b) { return b ? TriBool::True : TriBool::False; }

constexpr bool decidable(TriBool t) { return t != TriBool::Unknown; }

constexpr TriBool tri_and(TriBool a, TriBool b) {
    if (a == TriBool::False || b == TriBool::False) return TriBool::False;
    if (a == TriBool::Unknown || b == TriBool::Unknown) return TriBool::Unknown;
    return TriBool::True;
}

constexpr TriBool tri_or(TriBool a, TriBool b) {
    if (a == TriBool::True || b == TriBool::True) return TriBool::True;
    if (a == TriBool::Unknown || b == TriBool::Unknown) return TriBool::Unknown;
    return TriBool::False;
}

constexpr TriBool tri_and(TriBool a, TriBool b, TriBool c) { return tri_and(tri_and(a, b), c); }
constexpr TriBool tri_or(TriBool a, TriBool b, TriBool c) { return tri_or(tri_or(a, b), c); }

inline std::string_view tri_name(TriBool t) {
    switch (t) {
        case TriBool::False:
            return "false";
        case TriBool::True:
            return "true";
        case TriBool::Unknown:
            return "unknown";
    }
    return "?";
}

inline TriBool parse_tri(std::string_view text) {
    if (text == "true") return TriBool::True;
    if (text == "false") return TriBool::False;
    if (text == "unknown") return TriBool::Unknown;
    throw ParseError("unknown tri-bool '" + std::string(text) + "'");
}

// Whether a task type is expected to carry a human or professional
// comparator. Exempt tasks explicitly do not; uncovered tasks are ones the
// rule file takes no position on.
enum class Admissibility : unsigned char { expected, exempt, uncovered };

inline std::string_view admissibility_name(Admissibility a) {
    switch (a) {
        case Admissibility::expected:
            return "expected";
        case Admissibility::exempt:
            return "exempt";
        case Admissibility::uncovered:
            return "uncovered";
    }
    return "?";
}

inline Admissibility parse_admissibility(std::string_view text) {
    for (Admissibility a : {Admissibility::expected, Admissibility::exempt,
                            Admissibility::uncovered})
        if (text == admissibility_name(a)) return a;
    throw ParseError("unknown admissibility '" + std::string(text) + "'");
}

// Curated keyword rule: exempt keywords trump expect keywords, which trump
// the per-domain default. Matching is lowercase substring on the task text.
class AdmissibilityRules {
  public:
    static AdmissibilityRules load(const std::string& path) {
        return parse(detail::read_file(path));
    }

    static AdmissibilityRules parse(const std::string& bytes) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(bytes);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("admissibility rules are not valid JSON: ") + e.what());
        }
        if (!doc.is_object() || doc.value("schema", "") != "admissibility/v1")
            throw ValidationError("admissibility rules must declare schema admissibility/v1");
        AdmissibilityRules rules;
        if (!doc.contains("domain_defaults") || !doc["domain_defaults"].is_object())
            throw ValidationError("admissibility rules need a domain_defaults object");
        for (const auto& [key, value] : doc["domain_defaults"].items())
            rules.domain_defaults_[parse_domain(key)] =
                parse_admissibility(value.get<std::string>());
        for (Domain d : kAllDomains)
            if (!rules.domain_defaults_.count(d))
                throw ValidationError("admissibility rules miss a default for domain '" +
                                      std::string(domain_name(d)) + "'");
        for (const auto& kw : doc.value("exempt_keywords", nlohmann::json::array()))
            rules.exempt_keywords_.push_back(detail::to_lower(kw.get<std::string>()));
        for (const auto& kw : doc.value("expect_keywords", nlohmann::json::array()))
            rules.expect_keywords_.push_back(detail::to_lower(kw.get<std::string>()));
        return rules;
    }

    Admissibility classify(const std::string& task_description, Domain domain) const {
        std::string task = detail::to_lower(task_description);
        for (const auto& kw : exempt_keywords_)
            if (task.find(kw) != std::string::npos) return Admissibility::exempt;
        for (const auto& kw : expect_keywords_)
            if (task.find(kw) != std::string::npos) return Admissibility::expected;
        return domain_defaults_.at(domain);
    }

  private:
    std::map<Domain, Admissibility> domain_defaults_;
    std::vector<std::string> exempt_keywords_;
    std::vector<std::string> expect_keywords_;
};

// Earliest date a scaffolded (tool-or-agent harness) baseline existed within
// each model family. Families not listed are genuinely unknown.
class ScaffoldedBaselines {
  public:
    static ScaffoldedBaselines load(const std::string& path) {
        return from_csv(detail::read_file(path));
    }

    static ScaffoldedBaselines from_csv(const std::string& bytes) {
        auto rows = detail::parse_csv(bytes);
        if (rows.empty()) throw ParseError("scaffolded-baseline file has no header row");
        const std::vector<std::string> expect = {"family", "first_scaffolded_date"};
        if (rows[0] != expect)
            throw ParseError("scaffolded-baseline header does not match expected columns");
        ScaffoldedBaselines out;
        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() != expect.size())
                throw ParseError("scaffolded-baseline row " + std::to_string(r + 1) +
                                 " has wrong cell count");
            std::string family = detail::trim(row[0]);
            if (family.empty()) throw ValidationError("scaffolded-baseline row without a family");
            if (!out.earliest_.emplace(family, Date::parse(detail::trim(row[1]))).second)
                throw ValidationError("family '" + family + "' listed twice");
        }
        return out;
    }

    void set(const std::string& family, Date first) { earliest_[family] = first; }

    TriBool existed(const std::string& family, Date at) const {
        auto it = earliest_.find(family);
        if (it == earliest_.end()) return TriBool::Unknown;
        return tri_from(it->second <= at);
    }

  private:
    std::map<std::string, Date> earliest_;
};

// --- capability dimension ---------------------------------------------------

inline TriBool capability_fail(std::optional<double> gap, double tau = 12.0) {
    if (!(tau > 0.0)) throw ConfigError("capability threshold must be positive");
    if (!gap) return TriBool::Unknown;
    return tri_from(*gap >= tau);
}

// --- elicitation dimension --------------------------------------------------

enum class ElicitationMode : unsigned char { or3, and3 };

inline std::string_view elicitation_mode_name(ElicitationMode m) {
    return m == ElicitationMode::or3 ? "or3" : "and3";
}

namespace detail {

// Disclosure state of one config field as a tri-bool "is undisclosed",
// honouring the hole policy. not_applicable counts as not-undisclosed.
inline TriBool field_undisclosed(const std::optional<ConfigField>& field,
                                 MissingConfigPolicy policy) {
    if (!field)
        return policy == MissingConfigPolicy::null_as_undisclosed ? TriBool::True
                                                                  : TriBool::Unknown;
    switch (field->status) {
        case DisclosureStatus::undisclosed:
            return TriBool::True;
        case DisclosureStatus::disclosed:
        case DisclosureStatus::not_applicable:
            return TriBool::False;
    }
    return TriBool::Unknown;
}

inline bool value_mentions_zero_shot(const std::string& value) {
    std::string v = collapse_spaces(to_lower(fold_dashes(value)));
    return v.find("zero-shot") != std::string::npos || v.find("zero shot") != std::string::npos ||
           v.find("0-shot") != std::string::npos;
}

inline bool value_mentions_default(const std::string& value) {
    return to_lower(value).find("default") != std::string::npos;
}

}  // namespace detail

// Clause (a): a reasoning-capable model whose reasoning-mode status the paper
// does not disclose.
inline TriBool elicitation_clause_reasoning(const EvalConfig& config, const ModelCaps& caps,
                                            MissingConfigPolicy policy) {
    if (!caps.reasoning_capable) return TriBool::False;
    return detail::field_undisclosed(config[ConfigKey::reasoning_mode], policy);
}

// Clause (b): a tool-capable model whose tool-use status is undisclosed.
inline TriBool elicitation_clause_tools(const EvalConfig& config, const ModelCaps& caps,
                                        MissingConfigPolicy policy) {
    if (!caps.tool_capable) return TriBool::False;
    return detail::field_undisclosed(config[ConfigKey::tool_use], policy);
}

// Clause (c): a zero-shot or default-effort evaluation although a scaffolded
// within-family baseline already existed. "Zero-shot or default-effort" is
// the disjunction of a disclosed zero-shot prompting strategy and an
// undisclosed-or-default thinking effort.
inline TriBool elicitation_clause_zero_shot(const EvalConfig& config, const std::string& family,
                                            Date eval_date, const ScaffoldedBaselines& baselines,
                                            MissingConfigPolicy policy) {
    const auto& prompting = config[ConfigKey::prompting_strategy];
    TriBool zero_shot;
    if (!prompting)
        zero_shot = policy == MissingConfigPolicy::null_as_undisclosed ? TriBool::False
                                                                       : TriBool::Unknown;
    else if (prompting->status == DisclosureStatus::disclosed)
        zero_shot = tri_from(detail::value_mentions_zero_shot(prompting->value));
    else
        zero_shot = TriBool::False;

    const auto& effort = config[ConfigKey::thinking_effort];
    TriBool default_effort;
    if (!effort)
        default_effort = policy == MissingConfigPolicy::null_as_undisclosed ? TriBool::True
                                                                            : TriBool::Unknown;
    else if (effort->status == DisclosureStatus::undisclosed)
        default_effort = TriBool::True;
    else if (effort->status == DisclosureStatus::disclosed)
        default_effort = tri_from(detail::value_mentions_default(effort->value));
    else
        default_effort = TriBool::False;

    TriBool lazy_eval = tri_or(zero_shot, default_effort);
    return tri_and(lazy_eval, baselines.existed(family, eval_date));
}

inline TriBool elicitation_fail(const EvalConfig& config, const ModelCaps& caps,
                                const std::string& family, Date eval_date,
                                const ScaffoldedBaselines& baselines, ElicitationMode mode,
                                MissingConfigPolicy policy) {
    TriBool a = elicitation_clause_reasoning(config, caps, policy);
    TriBool b = elicitation_clause_tools(config, caps, policy);
    TriBool c = elicitation_clause_zero_shot(config, family, eval_date, baselines, policy);
    return mode == ElicitationMode::or3 ? tri_or(a, b, c) : tri_and(a, b, c);
}

// --- interpretive dimension -------------------------------------------------

enum class InterpretiveMode : unsigned char { and2, or2 };

inline std::string_view interpretive_mode_name(InterpretiveMode m) {
    return m == InterpretiveMode::and2 ? "and2" : "or2";
}

// Clause A: the task type expects a human comparator and none is present.
// Exempt tasks make this False outright; uncovered tasks leave it Unknown
// (unless a present comparator settles it).
inline TriBool interpretive_clause_comparator(const PaperRecord& paper, Admissibility adm) {
    TriBool absent = paper.human_comparator ? tri_from(!*paper.human_comparator)
                                            : TriBool::Unknown;
    TriBool expects = adm == Admissibility::expected
                          ? TriBool::True
                          : (adm == Admissibility::exempt ? TriBool::False : TriBool::Unknown);
    return tri_and(absent, expects);
}

// Clause B: the conclusion generalises to AI as a class.
inline TriBool interpretive_clause_framing(const PaperRecord& paper) {
    if (!paper.conclusion_framing) return TriBool::Unknown;
    return tri_from(*paper.conclusion_framing == Framing::ai_generic);
}

inline TriBool interpretive_fail(const PaperRecord& paper, Admissibility adm,
                                 InterpretiveMode mode) {
    TriBool a = interpretive_clause_comparator(paper, adm);
    TriBool b = interpretive_clause_framing(paper);
    return mode == InterpretiveMode::and2 ? tri_and(a, b) : tri_or(a, b);
}

// --- compound verdicts ------------------------------------------------------

struct ClassifierConfig {
    double tau = 12.0;
    ElicitationMode elicitation = ElicitationMode::or3;
    InterpretiveMode interpretive = InterpretiveMode::and2;
    MissingConfigPolicy missing = MissingConfigPolicy::null_as_undisclosed;

    std::string tags() const {
        char buf[96];
        std::snprintf(buf, sizeof buf, "tau=%.10g;elicitation=%s;interpretive=%s",
                      tau, std::string(elicitation_mode_name(elicitation)).c_str(),
                      std::string(interpretive_mode_name(interpretive)).c_str());
        return buf;
    }
};

struct PaperVerdict {
    std::string doi;
    TriBool capability = TriBool::Unknown;
    TriBool elicitation = TriBool::Unknown;
    TriBool interpretive = TriBool::Unknown;
    TriBool compound = TriBool::Unknown;
    Admissibility admissibility = Admissibility::uncovered;
};

// A paper with no gap vector (unresolved model, missing score) still gets an
// interpretive verdict; the other two dimensions come out Unknown.
inline PaperVerdict classify_paper(const PaperRecord& paper, const std::optional<GapVector>& gap,
                                   const CapabilityTable& table, const AdmissibilityRules& rules,
                                   const ScaffoldedBaselines& baselines,
                                   const ClassifierConfig& cfg = {}) {
    PaperVerdict v;
    v.doi = paper.doi;
    v.admissibility = rules.classify(paper.task_description, paper.domain);

    v.capability = capability_fail(gap ? std::optional<double>(gap->temporal_gap) : std::nullopt,
                                   cfg.tau);

    const ModelRecord* rec =
        paper.primary_model ? table.find(*paper.primary_model) : nullptr;
    if (rec && gap) {
        ModelCaps caps = caps_at(*rec, gap->eval_date);
        v.elicitation = elicitation_fail(paper.config, caps, rec->family, gap->eval_date,
                                         baselines, cfg.elicitation, cfg.missing);
    } else {
        v.elicitation = TriBool::Unknown;
    }

    v.interpretive = interpretive_fail(paper, v.admissibility, cfg.interpretive);
    v.compound = tri_and(v.capability, v.elicitation, v.interpretive);
    return v;
}

// --- corpus aggregation -----------------------------------------------------

struct EmptyDenominator : Error {
    using Error::Error;
};

enum class Denominator : unsigned char { strict_dropnone, trivalued, admissibility_expected, full };

inline std::string_view denominator_name(Denominator d) {
    switch (d) {
        case Denominator::strict_dropnone:
            return "strict_dropnone";
        case Denominator::trivalued:
            return "trivalued";
        case Denominator::admissibility_expected:
            return "admissibility_expected";
        case Denominator::full:
            return "full";
    }
    return "?";
}

struct RateResult {
    double rate = 0.0;
    stats::Interval ci;
    size_t k = 0;
    size_t n = 0;
    Denominator denominator = Denominator::trivalued;
};

inline RateResult corpus_rates(const std::vector<PaperVerdict>& verdicts, Denominator denom,
                               double conf = 0.95) {
    RateResult out;
    out.denominator = denom;
    for (const auto& v : verdicts) {
        bool in_denominator = false;
        switch (denom) {
            case Denominator::strict_dropnone:
                in_denominator =
                    decidable(v.capability) && decidable(v.elicitation) && decidable(v.interpretive);
                break;
            case Denominator::trivalued:
            case Denominator::full:
                in_denominator = decidable(v.compound);
                break;
            case Denominator::admissibility_expected:
                in_denominator =
                    decidable(v.compound) && v.admissibility == Admissibility::expected;
                break;
        }
        if (!in_denominator) continue;
        ++out.n;
        if (v.compound == TriBool::True) ++out.k;
    }
    if (out.n == 0)
        throw EmptyDenominator("no papers qualify for the " +
                               std::string(denominator_name(denom)) + " denominator");
    out.rate = static_cast<double>(out.k) / static_cast<double>(out.n);
    out.ci = stats::wilson(out.k, out.n, conf);
    return out;
}

// Counts over the 2^3 decidable cells, indexed by
// (capability << 0) | (elicitation << 1) | (interpretive << 2).
struct UpsetCells {
    std::array<size_t, 8> cells{};
    size_t strict_n = 0;
    double capability_rate = 0.0;
    double elicitation_rate = 0.0;
    double interpretive_rate = 0.0;

    size_t all_three() const { return cells[7]; }
};

inline UpsetCells upset_decomposition(const std::vector<PaperVerdict>& verdicts) {
    UpsetCells out;
    size_t cap = 0, elic = 0, interp = 0;
    for (const auto& v : verdicts) {
        if (!decidable(v.capability) || !decidable(v.elicitation) || !decidable(v.interpretive))
            continue;
        ++out.strict_n;
        size_t idx = (v.capability == TriBool::True ? 1u : 0u) |
                     (v.elicitation == TriBool::True ? 2u : 0u) |
                     (v.interpretive == TriBool::True ? 4u : 0u);
        ++out.cells[idx];
        cap += v.capability == TriBool::True;
        elic += v.elicitation == TriBool::True;
        interp += v.interpretive == TriBool::True;
    }
    if (out.strict_n > 0) {
        out.capability_rate = static_cast<double>(cap) / static_cast<double>(out.strict_n);
        out.elicitation_rate = static_cast<double>(elic) / static_cast<double>(out.strict_n);
        out.interpretive_rate = static_cast<double>(interp) / static_cast<double>(out.strict_n);
    }
    return out;
}

// Capability thresholds at the requested percentiles of the observed gaps
// (nearest-rank convention).
inline std::vector<double> percentile_taus(std::vector<double> gaps,
                                           const std::vector<double>& percentiles) {
    if (gaps.empty()) throw ValidationError("no gaps to take percentiles of");
    std::vector<double> taus;
    taus.reserve(percentiles.size());
    for (double p : percentiles)
        taus.push_back(stats::percentile_nearest_rank(gaps, p / 100.0));
    return taus;
}

struct SweepPoint {
    double tau = 0.0;
    RateResult rate;
};

// Re-classifies the corpus at each threshold. Only the capability dimension
// moves, so everything else is computed once per paper.
inline std::vector<SweepPoint> threshold_sweep(
    const std::vector<PaperRecord>& papers, const std::vector<std::optional<GapVector>>& gaps,
    const CapabilityTable& table, const AdmissibilityRules& rules,
    const ScaffoldedBaselines& baselines, const std::vector<double>& taus, Denominator denom,
    ClassifierConfig cfg = {}) {
    if (papers.size() != gaps.size())
        throw ValidationError("papers and gap vectors must line up one-to-one");
    std::vector<SweepPoint> out;
    out.reserve(taus.size());
    for (double tau : taus) {
        cfg.tau = tau;
        std::vector<PaperVerdict> verdicts;
        verdicts.reserve(papers.size());
        for (size_t i = 0; i < papers.size(); ++i)
            verdicts.push_back(classify_paper(papers[i], gaps[i], table, rules, baselines, cfg));
        out.push_back({tau, corpus_rates(verdicts, denom)});
    }
    return out;
}

// doi,capability,elicitation,interpretive,compound,tags
inline std::string verdicts_to_csv(const std::vector<PaperVerdict>& verdicts,
                                   const ClassifierConfig& cfg) {
    std::string out = "doi,capability,elicitation,interpretive,compound,tags\n";
    std::string tags = cfg.tags();
    for (const auto& v : verdicts)
        out += detail::csv_row({v.doi, std::string(tri_name(v.capability)),
                                std::string(tri_name(v.elicitation)),
                                std::string(tri_name(v.interpretive)),
                                std::string(tri_name(v.compound)), tags});
    return out;
}

}  // namespace frontier_audit
