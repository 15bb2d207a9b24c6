#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "capability_table.hpp"
#include "detail/dates.hpp"
#include "errors.hpp"
#include "frontier.hpp"
#include "paper_record.hpp"
#include "scales.hpp"

namespace frontier_audit {

// The paper's primary model cannot be mapped to a table row.
struct UnresolvedModel : Error {
    using Error::Error;
};

// The model resolved but carries no score on the requested scale under the
// active lookup policy.
struct MissingScore : Error {
    using Error::Error;
};

enum class EvalDateSource : unsigned char { disclosed, imputed, clipped_to_release };

inline std::string_view eval_date_source_name(EvalDateSource s) {
    switch (s) {
        case EvalDateSource::disclosed:
            return "disclosed";
        case EvalDateSource::imputed:
            return "imputed";
        case EvalDateSource::clipped_to_release:
            return "clipped_to_release";
    }
    return "?";
}

struct EvalDate {
    Date date;
    EvalDateSource source = EvalDateSource::imputed;
};

// Publication date minus the review lag, but never before the model existed.
inline EvalDate impute_eval_date(Date publication, Date release, long lag_days) {
    if (lag_days < 0) throw ConfigError("imputation lag must be non-negative");
    Date candidate = publication.minus_days(lag_days);
    if (release > candidate) return {release, EvalDateSource::clipped_to_release};
    return {candidate, EvalDateSource::imputed};
}

// Disclosed dates win; everything else goes through the imputation rule.
inline EvalDate resolve_eval_date(const PaperRecord& paper, Date release, long lag_days) {
    if (paper.eval_date_disclosed) return {*paper.eval_date_disclosed, EvalDateSource::disclosed};
    return impute_eval_date(paper.publication_date, release, lag_days);
}

// What the model could do at a specific date. Reasoning capability switches
// on at its availability date; tool capability has no dated rollout in the
// table and is taken as released-with-the-model.
struct ModelCaps {
    bool reasoning_capable = false;
    bool tool_capable = false;
};

inline ModelCaps caps_at(const ModelRecord& rec, Date date) {
    ModelCaps caps;
    caps.reasoning_capable =
        rec.reasoning_capable &&
        (!rec.reasoning_available_date || *rec.reasoning_available_date <= date);
    caps.tool_capable = rec.tool_capable;
    return caps;
}

// How a configuration hole (field never extracted) is scored. The primary
// analysis counts holes as disclosure failures; the sensitivity drops them.
enum class MissingConfigPolicy : unsigned char { null_as_undisclosed, null_as_missing };

inline bool config_component_applicable(ConfigKey key, const ModelCaps& caps) {
    switch (key) {
        case ConfigKey::reasoning_mode:
        case ConfigKey::thinking_effort:
            return caps.reasoning_capable;
        case ConfigKey::tool_use:
            return caps.tool_capable;
        default:
            return true;
    }
}

// Mean disclosure score over the six elicitation components. Inapplicable
// components (by field status or by model capability) leave the mean; absent
// when nothing remains.
inline std::optional<double> elicitation_index(
    const EvalConfig& config, const ModelCaps& caps,
    MissingConfigPolicy policy = MissingConfigPolicy::null_as_undisclosed) {
    int kept = 0;
    double sum = 0.0;
    for (ConfigKey key : kElicitationKeys) {
        if (!config_component_applicable(key, caps)) continue;
        const auto& field = config[key];
        if (!field) {
            if (policy == MissingConfigPolicy::null_as_missing) continue;
            ++kept;  // hole scored as undisclosed: contributes 0
            continue;
        }
        switch (field->status) {
            case DisclosureStatus::not_applicable:
                break;
            case DisclosureStatus::disclosed:
                ++kept;
                sum += 1.0;
                break;
            case DisclosureStatus::undisclosed:
                ++kept;
                break;
        }
    }
    if (kept == 0) return std::nullopt;
    return sum / kept;
}

struct TierGapConfig {
    long window_days = 90;
    // Primary rule admits siblings released up to window_days after the eval
    // date; the sensitivity variant requires the sibling to predate the eval.
    bool require_release_before_eval = false;
};

// Best same-family alternative the authors left untested: max sibling score
// strictly above the tested model's, among releases inside the window around
// the eval date. Absent when no such sibling exists (not a dyad).
inline std::optional<double> tier_gap(const CapabilityTable& table,
                                      const std::string& tested_key, double tested_score,
                                      Date eval_date, Scale scale,
                                      const TierGapConfig& cfg = {}) {
    const ModelRecord& tested = table.at(tested_key);
    Date lo = eval_date.minus_days(cfg.window_days);
    Date hi = cfg.require_release_before_eval ? eval_date : eval_date.plus_days(cfg.window_days);
    std::optional<double> best;
    for (const auto& cand : table.records()) {
        if (cand.canonical_key == tested.canonical_key) continue;
        if (cand.family != tested.family) continue;
        if (cand.release_date < lo || cand.release_date > hi) continue;
        auto score = cand.score(scale);
        if (!score || *score <= tested_score) continue;
        if (!best || *score > tested_score + *best) best = *score - tested_score;
    }
    return best;
}

struct GapConfig {
    Scale scale = Scale::eci;
    long lag_days = 180;
    LookupPolicy lookup = LookupPolicy::strict;
    MissingConfigPolicy missing = MissingConfigPolicy::null_as_undisclosed;
    TierGapConfig tier;
};

struct GapVector {
    std::string model_key;
    Date eval_date;
    EvalDateSource eval_date_source = EvalDateSource::imputed;
    double temporal_gap = 0.0;
    std::optional<double> tier_gap;
    std::optional<double> elicitation_index;
    std::optional<double> shortfall;  // temporal_gap x (1 - elicitation_index)
    Scale scale = Scale::eci;
    bool score_imputed = false;
    bool frontier_extrapolated = false;
};

inline GapVector compute_gap(const PaperRecord& paper, const CapabilityTable& table,
                             const FrontierTrajectory& traj, const GapConfig& cfg = {}) {
    if (!paper.primary_model)
        throw UnresolvedModel("paper " + paper.doi + " has no resolved primary model (raw: '" +
                              paper.primary_model_raw + "')");
    const ModelRecord* rec = table.find(*paper.primary_model);
    if (!rec)
        throw UnresolvedModel("paper " + paper.doi + " names '" + *paper.primary_model +
                              "', which is not in the capability table");

    ScoreLookup score = table.lookup_score(rec->canonical_key, cfg.scale, cfg.lookup);
    if (!score.ok())
        throw MissingScore("paper " + paper.doi + ": no " + std::string(scale_name(cfg.scale)) +
                           " score for '" + rec->canonical_key + "' (" +
                           (score.outcome == LookupOutcome::no_sibling ? "no sibling donor"
                                                                       : "no direct value") +
                           ")");

    GapVector out;
    out.model_key = rec->canonical_key;
    out.scale = cfg.scale;
    out.score_imputed = score.imputed;

    EvalDate ed = resolve_eval_date(paper, rec->release_date, cfg.lag_days);
    out.eval_date = ed.date;
    out.eval_date_source = ed.source;

    TrajectoryValue frontier = traj.value_at(ed.date);
    out.frontier_extrapolated = frontier.extrapolated;
    out.temporal_gap = frontier.score - score.value;

    out.tier_gap = tier_gap(table, rec->canonical_key, score.value, ed.date, cfg.scale, cfg.tier);

    out.elicitation_index = elicitation_index(paper.config, caps_at(*rec, ed.date), cfg.missing);
    if (out.elicitation_index)
        out.shortfall = out.temporal_gap * (1.0 - *out.elicitation_index);
    return out;
}

// Per-domain review-lag medians, loaded from a small JSON config.
using LagMedians = std::map<Domain, long>;

inline LagMedians parse_lag_medians(const std::string& bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("lag-median config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != "lag_medians/v1")
        throw ValidationError("lag-median config must declare schema lag_medians/v1");
    if (!doc.contains("days") || !doc["days"].is_object())
        throw ValidationError("lag-median config needs a 'days' object");
    LagMedians out;
    for (const auto& [key, value] : doc["days"].items()) {
        Domain d = parse_domain(key);
        if (!value.is_number_integer() || value.get<long>() < 0)
            throw ValidationError("lag median for " + key + " must be a non-negative integer");
        out[d] = value.get<long>();
    }
    return out;
}

inline LagMedians load_lag_medians(const std::string& path) {
    return parse_lag_medians(detail::read_file(path));
}

// Frontier growth over one domain's review lag: the part of the observed gap
// a rational-lag reading would already expect.
inline double rational_lag_baseline(Domain domain, const LagMedians& medians,
                                    const FrontierTrajectory& traj, Date reference) {
    auto it = medians.find(domain);
    if (it == medians.end())
        throw ConfigError("no review-lag median configured for domain '" +
                          std::string(domain_name(domain)) + "'");
    double now = traj.value_at(reference).score;
    double then = traj.value_at(reference.minus_days(it->second)).score;
    return now - then;
}

}  // namespace frontier_audit
