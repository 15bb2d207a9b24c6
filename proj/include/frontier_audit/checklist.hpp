#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

// The 13-item reporting checklist: desk-reject tier, frame coherence,
// exemplar floor, and the two-surface disclosure ladder.
namespace frontier_audit::checklist {

struct MissingFields : Error {
    using Error::Error;
};

enum class Disclosure : unsigned char { disclosed, undisclosed, not_applicable };

inline std::string_view disclosure_name(Disclosure d) {
    switch (d) {
        case Disclosure::disclosed:
            return "disclosed";
        case Disclosure::undisclosed:
            return "undisclosed";
        case Disclosure::not_applicable:
            return "not_applicable";
    }
    return "?";
}

inline Disclosure parse_disclosure(std::string_view text) {
    for (Disclosure d : {Disclosure::disclosed, Disclosure::undisclosed,
                         Disclosure::not_applicable})
        if (text == disclosure_name(d)) return d;
    throw ParseError("unknown disclosure status '" + std::string(text) + "'");
}

enum class DeclaredFrame : unsigned char { frontier, deployment, tier_specific };

inline std::string_view frame_name(DeclaredFrame f) {
    switch (f) {
        case DeclaredFrame::frontier:
            return "frontier";
        case DeclaredFrame::deployment:
            return "deployment";
        case DeclaredFrame::tier_specific:
            return "tier_specific";
    }
    return "?";
}

inline DeclaredFrame parse_frame(std::string_view text) {
    for (DeclaredFrame f : {DeclaredFrame::frontier, DeclaredFrame::deployment,
                            DeclaredFrame::tier_specific})
        if (text == frame_name(f)) return f;
    throw ParseError("unknown declared frame '" + std::string(text) + "'");
}

constexpr int kItemCount = 13;
constexpr std::array<int, 3> kCore3 = {1, 5, 7};
constexpr std::array<int, 8> kExemplarEligible = {3, 6, 8, 9, 10, 11, 12, 13};

// 1: model version  2: provider/access  3: eval date window  4: tier+rationale
// 5: declared frame  6: comparator  7: reasoning mode  8: reasoning effort
// 9: tool use  10: scaffolding  11: prompting  12: sampling  13: concordance
struct ChecklistAssessment {
    std::array<Disclosure, kItemCount> items{};
    std::optional<DeclaredFrame> declared_frame;
    std::optional<bool> tested_tier_is_frontier;

    Disclosure item(int number) const {
        if (number < 1 || number > kItemCount)
            throw ValidationError("checklist item number out of range: " +
                                  std::to_string(number));
        return items[static_cast<size_t>(number - 1)];
    }

    void set_item(int number, Disclosure d) {
        if (number < 1 || number > kItemCount)
            throw ValidationError("checklist item number out of range: " +
                                  std::to_string(number));
        items[static_cast<size_t>(number - 1)] = d;
    }

    // Item 7 has nothing to bind on only when the model cannot reason.
    void validate(bool reasoning_capable) const {
        if (item(7) == Disclosure::not_applicable && reasoning_capable)
            throw ValidationError(
                "item 7 marked not_applicable on a reasoning-capable model");
    }

    static ChecklistAssessment from_json(const nlohmann::json& doc) {
        ChecklistAssessment a;
        if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_object())
            throw ParseError("assessment JSON needs an 'items' object");
        for (int n = 1; n <= kItemCount; ++n) {
            std::string key = std::to_string(n);
            if (!doc["items"].contains(key))
                throw ParseError("assessment is missing item " + key);
            a.set_item(n, parse_disclosure(doc["items"][key].get<std::string>()));
        }
        if (doc.contains("declared_frame") && !doc["declared_frame"].is_null())
            a.declared_frame = parse_frame(doc["declared_frame"].get<std::string>());
        if (doc.contains("tested_tier_is_frontier") &&
            !doc["tested_tier_is_frontier"].is_null())
            a.tested_tier_is_frontier = doc["tested_tier_is_frontier"].get<bool>();
        return a;
    }

    nlohmann::json to_json() const {
        nlohmann::json items_obj = nlohmann::json::object();
        for (int n = 1; n <= kItemCount; ++n)
            items_obj[std::to_string(n)] = std::string(disclosure_name(item(n)));
        nlohmann::json doc;
        doc["items"] = std::move(items_obj);
        if (declared_frame) doc["declared_frame"] = std::string(frame_name(*declared_frame));
        if (tested_tier_is_frontier) doc["tested_tier_is_frontier"] = *tested_tier_is_frontier;
        return doc;
    }
};

// ---- desk-reject tier -----------------------------------------------------

struct Core3Result {
    bool pass = false;
    std::vector<int> failing;
};

inline Core3Result core3(const ChecklistAssessment& a) {
    Core3Result r;
    if (a.item(1) != Disclosure::disclosed) r.failing.push_back(1);
    if (a.item(5) != Disclosure::disclosed) r.failing.push_back(5);
    if (a.item(7) == Disclosure::undisclosed) r.failing.push_back(7);
    r.pass = r.failing.empty();
    return r;
}

// False only for a frontier claim on a non-frontier tier; the other frames
// are coherent with any tier.
inline bool frame_coherence(const ChecklistAssessment& a) {
    if (!a.declared_frame || !a.tested_tier_is_frontier)
        throw MissingFields("frame coherence needs declared_frame and tested_tier_is_frontier");
    return !(*a.declared_frame == DeclaredFrame::frontier && !*a.tested_tier_is_frontier);
}

inline bool exemplar_floor(const ChecklistAssessment& a) {
    if (!core3(a).pass) return false;
    if (!frame_coherence(a)) return false;
    int extra = 0;
    for (int n : kExemplarEligible)
        if (a.item(n) == Disclosure::disclosed) ++extra;
    return extra >= 3;
}

// Optional derived composite over items 7..11; itemised reporting stays the
// contract, so nothing downstream of desk-reject consumes this.
inline std::optional<double> elicitation_completeness(
    const ChecklistAssessment& a,
    const std::array<double, 5>& weights = {1.0, 1.0, 1.0, 1.0, 1.0}) {
    double scored = 0.0, weight = 0.0;
    for (int n = 7; n <= 11; ++n) {
        Disclosure d = a.item(n);
        if (d == Disclosure::not_applicable) continue;
        double w = weights[static_cast<size_t>(n - 7)];
        if (w < 0.0) throw ConfigError("composite weights must be non-negative");
        weight += w;
        if (d == Disclosure::disclosed) scored += w;
    }
    if (weight == 0.0) return std::nullopt;
    return scored / weight;
}

// ---- disclosure ladder ------------------------------------------------------

struct LadderRow {
    int item = 1;
    bool conditioned = true;  // denominator excludes not_applicable papers
    size_t abstract_k = 0, abstract_n = 0;
    size_t fulltext_k = 0, fulltext_n = 0;
    double abstract_rate = 0.0;
    double fulltext_rate = 0.0;
    double lift_pp = 0.0;
};

using SurfaceAssessments = std::map<std::string, ChecklistAssessment>;  // keyed by DOI

inline LadderRow ladder_row(int item, bool conditioned, const SurfaceAssessments& abstracts,
                            const SurfaceAssessments& full_texts) {
    LadderRow row;
    row.item = item;
    row.conditioned = conditioned;
    auto tally = [&](const SurfaceAssessments& surface, size_t& k, size_t& n) {
        for (const auto& [doi, a] : surface) {
            (void)doi;
            Disclosure d = a.item(item);
            if (conditioned && d == Disclosure::not_applicable) continue;
            ++n;
            if (d == Disclosure::disclosed) ++k;
        }
    };
    tally(abstracts, row.abstract_k, row.abstract_n);
    tally(full_texts, row.fulltext_k, row.fulltext_n);
    row.abstract_rate =
        row.abstract_n ? static_cast<double>(row.abstract_k) / row.abstract_n : 0.0;
    row.fulltext_rate =
        row.fulltext_n ? static_cast<double>(row.fulltext_k) / row.fulltext_n : 0.0;
    row.lift_pp = 100.0 * (row.fulltext_rate - row.abstract_rate);
    return row;
}

// Per-item rates at both surfaces plus the full-text lift. Conditioned rows
// for every item, then raw (unconditioned) variants for the two
// applicability-gated items, 7 and 9.
inline std::vector<LadderRow> disclosure_ladder(const SurfaceAssessments& abstracts,
                                                const SurfaceAssessments& full_texts) {
    for (const auto& [doi, a] : full_texts) {
        (void)a;
        if (!abstracts.count(doi))
            throw ValidationError("full-text assessment for '" + doi +
                                  "' has no abstract-level counterpart");
    }
    std::vector<LadderRow> rows;
    for (int n = 1; n <= kItemCount; ++n)
        rows.push_back(ladder_row(n, true, abstracts, full_texts));
    rows.push_back(ladder_row(7, false, abstracts, full_texts));
    rows.push_back(ladder_row(9, false, abstracts, full_texts));
    return rows;
}

inline std::string ladder_to_csv(const std::vector<LadderRow>& rows) {
    std::string out =
        "item,conditioned,abstract_k,abstract_n,abstract_rate,"
        "fulltext_k,fulltext_n,fulltext_rate,lift_pp\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%zu,%zu,%.6f,%zu,%zu,%.6f,%.4f\n", r.item,
                      r.conditioned ? "true" : "false", r.abstract_k, r.abstract_n,
                      r.abstract_rate, r.fulltext_k, r.fulltext_n, r.fulltext_rate, r.lift_pp);
        out += buf;
    }
    return out;
}

}  // namespace frontier_audit::checklist
