#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "capability_table.hpp"
#include "detail/csv.hpp"
#include "detail/dates.hpp"
#include "detail/strings.hpp"
#include "errors.hpp"

namespace frontier_audit {

// Product-surface names that route to different underlying models depending
// on when the mention was written ("the chat product" before vs after a
// backend switch). The threshold date is data, not code.
struct RoutingRule {
    Date threshold;
    std::string pre_key;
    std::string post_key;
};

// Curated mention-to-key mapping loaded from CSV with rows
//   kind,token,target_key,threshold_date,pre_key,post_key
// kind is one of alias | family_default | routing. Tokens are stored in
// normalized form and must be globally unambiguous.
class AliasMap {
  public:
    static AliasMap load(const std::string& path) { return from_csv(detail::read_file(path)); }

    static AliasMap from_csv(const std::string& bytes);

    const std::map<std::string, std::string>& aliases() const { return aliases_; }
    const std::map<std::string, std::string>& family_defaults() const { return family_defaults_; }
    const std::map<std::string, RoutingRule>& routing() const { return routing_; }

  private:
    void claim(const std::string& token) {
        if (aliases_.count(token) || family_defaults_.count(token) || routing_.count(token))
            throw ValidationError("ambiguous alias token '" + token + "' mapped twice");
    }

    std::map<std::string, std::string> aliases_;
    std::map<std::string, std::string> family_defaults_;
    std::map<std::string, RoutingRule> routing_;
};

enum class ResolveMethod : unsigned char {
    exact,           // normalized mention is itself a canonical key
    table_alias,     // matched an alias column entry in the capability table
    mapped_alias,    // matched a curated alias row
    family_default,  // bare family mention mapped to its designated member
    routed,          // product-surface mention routed by context date
    unresolved,
};

struct ResolvedModel {
    std::string key;  // empty when unresolved
    ResolveMethod method = ResolveMethod::unresolved;
    std::string note;  // human-readable reason when unresolved

    bool ok() const { return method != ResolveMethod::unresolved; }
};

inline std::string_view resolve_method_name(ResolveMethod m) {
    switch (m) {
        case ResolveMethod::exact:
            return "exact";
        case ResolveMethod::table_alias:
            return "table_alias";
        case ResolveMethod::mapped_alias:
            return "mapped_alias";
        case ResolveMethod::family_default:
            return "family_default";
        case ResolveMethod::routed:
            return "routed";
        case ResolveMethod::unresolved:
            return "unresolved";
    }
    return "?";
}

// Maps raw model mentions from paper text onto canonical table keys.
// Normalization is deliberately conservative: lowercase, whitespace collapse,
// unicode-dash folding. Anything fuzzier belongs in the curated alias file
// where a human signed off on it.
class ModelResolver {
  public:
    ModelResolver(const CapabilityTable& table, AliasMap alias_map)
        : table_(&table), map_(std::move(alias_map)) {
        for (const auto& rec : table.records()) {
            keys_.emplace(normalize(rec.canonical_key), rec.canonical_key);
            for (const auto& alias : rec.aliases)
                table_aliases_.emplace(normalize(alias), rec.canonical_key);
        }
    }

    static std::string normalize(std::string_view raw) {
        return detail::collapse_spaces(
            detail::trim(detail::fold_dashes(detail::to_lower(raw))));
    }

    ResolvedModel resolve(const std::string& raw_mention,
                          std::optional<Date> context_date = std::nullopt) const {
        std::string token = normalize(raw_mention);
        if (token.empty()) return {"", ResolveMethod::unresolved, "empty mention"};

        if (auto it = keys_.find(token); it != keys_.end())
            return {it->second, ResolveMethod::exact, ""};
        if (auto it = table_aliases_.find(token); it != table_aliases_.end())
            return {it->second, ResolveMethod::table_alias, ""};
        if (auto it = map_.aliases().find(token); it != map_.aliases().end())
            return confirmed(it->second, ResolveMethod::mapped_alias);
        if (auto it = map_.routing().find(token); it != map_.routing().end()) {
            if (!context_date)
                return {"", ResolveMethod::unresolved,
                        "mention '" + token + "' routes by date but no context date was given"};
            const RoutingRule& rule = it->second;
            const std::string& key =
                *context_date < rule.threshold ? rule.pre_key : rule.post_key;
            return confirmed(key, ResolveMethod::routed);
        }
        if (auto it = map_.family_defaults().find(token); it != map_.family_defaults().end())
            return confirmed(it->second, ResolveMethod::family_default);

        return {"", ResolveMethod::unresolved, "no rule matches '" + token + "'"};
    }

  private:
    ResolvedModel confirmed(const std::string& key, ResolveMethod method) const {
        if (!table_->find(key))
            return {"", ResolveMethod::unresolved,
                    "alias file maps to '" + key + "' which is not in the capability table"};
        return {key, method, ""};
    }

    const CapabilityTable* table_;
    AliasMap map_;
    std::map<std::string, std::string> keys_;
    std::map<std::string, std::string> table_aliases_;
};

inline AliasMap AliasMap::from_csv(const std::string& bytes) {
    AliasMap out;
    auto rows = detail::parse_csv(bytes);
    if (rows.empty()) throw ParseError("alias map has no header row");
    const std::vector<std::string> expect = {"kind",           "token",   "target_key",
                                             "threshold_date", "pre_key", "post_key"};
    if (rows[0] != expect) throw ParseError("alias map header does not match expected columns");
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != expect.size())
            throw ParseError("alias map row " + std::to_string(r + 1) + " has wrong cell count");
        std::string kind = detail::trim(row[0]);
        std::string token = ModelResolver::normalize(row[1]);
        if (token.empty())
            throw ValidationError("alias map row " + std::to_string(r + 1) + " has empty token");
        out.claim(token);
        if (kind == "alias") {
            if (detail::trim(row[2]).empty())
                throw ValidationError("alias '" + token + "' lacks a target_key");
            out.aliases_[token] = detail::trim(row[2]);
        } else if (kind == "family_default") {
            if (detail::trim(row[2]).empty())
                throw ValidationError("family_default '" + token + "' lacks a target_key");
            out.family_defaults_[token] = detail::trim(row[2]);
        } else if (kind == "routing") {
            if (detail::trim(row[3]).empty())
                throw ValidationError("routing rule '" + token + "' lacks a threshold date");
            RoutingRule rule;
            rule.threshold = Date::parse(detail::trim(row[3]));
            rule.pre_key = detail::trim(row[4]);
            rule.post_key = detail::trim(row[5]);
            if (rule.pre_key.empty() || rule.post_key.empty())
                throw ValidationError("routing rule '" + token + "' needs pre_key and post_key");
            out.routing_[token] = rule;
        } else {
            throw ParseError("unknown alias map kind '" + kind + "'");
        }
    }
    return out;
}

}  // namespace frontier_audit
