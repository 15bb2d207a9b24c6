#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detail/dates.hpp"
#include "errors.hpp"

namespace frontier_audit {

enum class Domain : unsigned char {
    medicine,
    law,
    coding,
    education,
    scientific_reasoning,
    other,
};

inline constexpr std::array<Domain, 6> kAllDomains = {
    Domain::medicine, Domain::law,   Domain::coding,
    Domain::education, Domain::scientific_reasoning, Domain::other,
};

inline std::string_view domain_name(Domain d) {
    switch (d) {
        case Domain::medicine:
            return "medicine";
        case Domain::law:
            return "law";
        case Domain::coding:
            return "coding";
        case Domain::education:
            return "education";
        case Domain::scientific_reasoning:
            return "scientific_reasoning";
        case Domain::other:
            return "other";
    }
    return "?";
}

inline Domain parse_domain(std::string_view text) {
    for (Domain d : kAllDomains)
        if (text == domain_name(d)) return d;
    throw ParseError("unknown domain '" + std::string(text) + "'");
}

// Four-step conclusion valence, ordered from most to least pessimistic.
enum class Valence : unsigned char { negative, mixed, neutral, positive };

inline std::string_view valence_name(Valence v) {
    switch (v) {
        case Valence::negative:
            return "negative";
        case Valence::mixed:
            return "mixed";
        case Valence::neutral:
            return "neutral";
        case Valence::positive:
            return "positive";
    }
    return "?";
}

inline Valence parse_valence(std::string_view text) {
    for (Valence v : {Valence::negative, Valence::mixed, Valence::neutral, Valence::positive})
        if (text == valence_name(v)) return v;
    throw ParseError("unknown valence '" + std::string(text) + "'");
}

// Numeric encoding for the regression sensitivity: the contrast of interest
// is negative vs positive, with the middle categories at zero.
inline double valence_numeric(Valence v) {
    switch (v) {
        case Valence::negative:
            return -1.0;
        case Valence::mixed:
        case Valence::neutral:
            return 0.0;
        case Valence::positive:
            return 1.0;
    }
    return 0.0;
}

enum class Framing : unsigned char { ai_generic, model_specific };

inline std::string_view framing_name(Framing f) {
    return f == Framing::ai_generic ? "ai_generic" : "model_specific";
}

inline Framing parse_framing(std::string_view text) {
    if (text == "ai_generic") return Framing::ai_generic;
    if (text == "model_specific") return Framing::model_specific;
    throw ParseError("unknown framing '" + std::string(text) + "'");
}

enum class DisclosureStatus : unsigned char { disclosed, undisclosed, not_applicable };

inline std::string_view disclosure_name(DisclosureStatus s) {
    switch (s) {
        case DisclosureStatus::disclosed:
            return "disclosed";
        case DisclosureStatus::undisclosed:
            return "undisclosed";
        case DisclosureStatus::not_applicable:
            return "not_applicable";
    }
    return "?";
}

inline DisclosureStatus parse_disclosure(std::string_view text) {
    for (DisclosureStatus s : {DisclosureStatus::disclosed, DisclosureStatus::undisclosed,
                               DisclosureStatus::not_applicable})
        if (text == disclosure_name(s)) return s;
    throw ParseError("unknown disclosure status '" + std::string(text) + "'");
}

// One extracted configuration-reporting field. The value text is only
// meaningful for disclosed fields ("zero-shot", "temperature 0", ...).
struct ConfigField {
    DisclosureStatus status = DisclosureStatus::undisclosed;
    std::string value;

    static ConfigField disclosed(std::string v) {
        return {DisclosureStatus::disclosed, std::move(v)};
    }
    static ConfigField undisclosed() { return {DisclosureStatus::undisclosed, ""}; }
    static ConfigField not_applicable() { return {DisclosureStatus::not_applicable, ""}; }
};

// The eight configuration-reporting axes, in their fixed extraction order.
// The first six form the elicitation index.
enum class ConfigKey : unsigned char {
    reasoning_mode,
    thinking_effort,
    tool_use,
    scaffolding,
    multi_agent,
    prompting_strategy,
    access_method,
    temperature,
};

inline constexpr std::array<ConfigKey, 8> kAllConfigKeys = {
    ConfigKey::reasoning_mode, ConfigKey::thinking_effort,    ConfigKey::tool_use,
    ConfigKey::scaffolding,    ConfigKey::multi_agent,        ConfigKey::prompting_strategy,
    ConfigKey::access_method,  ConfigKey::temperature,
};

inline constexpr std::array<ConfigKey, 6> kElicitationKeys = {
    ConfigKey::reasoning_mode, ConfigKey::thinking_effort, ConfigKey::tool_use,
    ConfigKey::scaffolding,    ConfigKey::multi_agent,     ConfigKey::prompting_strategy,
};

inline std::string_view config_key_name(ConfigKey k) {
    switch (k) {
        case ConfigKey::reasoning_mode:
            return "reasoning_mode";
        case ConfigKey::thinking_effort:
            return "thinking_effort";
        case ConfigKey::tool_use:
            return "tool_use";
        case ConfigKey::scaffolding:
            return "scaffolding";
        case ConfigKey::multi_agent:
            return "multi_agent";
        case ConfigKey::prompting_strategy:
            return "prompting_strategy";
        case ConfigKey::access_method:
            return "access_method";
        case ConfigKey::temperature:
            return "temperature";
    }
    return "?";
}

inline ConfigKey parse_config_key(std::string_view text) {
    for (ConfigKey k : kAllConfigKeys)
        if (text == config_key_name(k)) return k;
    throw ParseError("unknown config field '" + std::string(text) + "'");
}

// A field left unset means the extractor produced nothing for it, which is
// distinct from an extracted "undisclosed": the null-handling policy decides
// how the hole is scored.
struct EvalConfig {
    std::array<std::optional<ConfigField>, 8> fields;

    std::optional<ConfigField>& operator[](ConfigKey k) {
        return fields[static_cast<size_t>(k)];
    }
    const std::optional<ConfigField>& operator[](ConfigKey k) const {
        return fields[static_cast<size_t>(k)];
    }
};

struct PaperRecord {
    std::string doi;
    Date publication_date;
    std::string journal;
    Domain domain = Domain::other;

    std::string primary_model_raw;
    std::optional<std::string> primary_model;  // canonical key once resolved
    std::vector<std::string> models_evaluated;

    std::optional<Date> eval_date_disclosed;
    EvalConfig config;

    std::optional<Valence> conclusion_valence;
    std::optional<Framing> conclusion_framing;
    std::optional<bool> human_comparator;
    std::string task_description;

    std::map<std::string, double> extraction_confidence;
    // Named dates extracted alongside (submission, acceptance, copyright,
    // training cutoff, releases of model / benchmark / dataset, prior-study
    // date). A disclosed eval date equal to any of them is a proxy, not a
    // measurement, and is rejected by the validation below.
    std::map<std::string, Date> proxy_dates;

    int publication_year() const { return publication_date.year(); }
};

// Names of the proxy fields a disclosed eval date collides with, in map
// order; "publication_date" is always checked even without a proxy entry.
inline std::vector<std::string> forbidden_proxy_hits(const PaperRecord& paper) {
    std::vector<std::string> hits;
    if (!paper.eval_date_disclosed) return hits;
    if (*paper.eval_date_disclosed == paper.publication_date)
        hits.push_back("publication_date");
    for (const auto& [name, date] : paper.proxy_dates)
        if (*paper.eval_date_disclosed == date) hits.push_back(name);
    return hits;
}

inline void validate_eval_date(const PaperRecord& paper) {
    if (!paper.eval_date_disclosed) return;
    if (paper.publication_date < *paper.eval_date_disclosed)
        throw ValidationError("paper " + paper.doi + " discloses an eval date " +
                              paper.eval_date_disclosed->iso() + " after its publication date " +
                              paper.publication_date.iso());
    auto hits = forbidden_proxy_hits(paper);
    if (!hits.empty()) {
        std::string joined;
        for (const auto& h : hits) joined += (joined.empty() ? "" : ", ") + h;
        throw ValidationError("paper " + paper.doi + " discloses an eval date equal to " + joined +
                              ", which the proxy filter forbids");
    }
}

}  // namespace frontier_audit
