#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detail/csv.hpp"
#include "detail/dates.hpp"
#include "detail/sha256.hpp"
#include "detail/strings.hpp"
#include "errors.hpp"
#include "scales.hpp"

namespace frontier_audit {

// One row of the frozen capability table.
struct ModelRecord {
    std::string canonical_key;
    std::string family;
    std::string tier;  // tier label within the family ("opus", "mini", ...)
    Date release_date;
    std::array<std::optional<double>, 3> scores{};  // indexed by Scale
    std::optional<double> price_in;                 // USD per 1M input tokens
    std::optional<double> price_out;
    bool is_frontier_tier = false;
    bool reasoning_capable = false;
    std::optional<Date> reasoning_available_date;
    bool tool_capable = false;
    std::vector<std::string> aliases;

    std::optional<double> score(Scale s) const { return scores[static_cast<size_t>(s)]; }
};

enum class LookupPolicy : unsigned char { strict, sibling_impute };

enum class LookupOutcome : unsigned char { found, unknown_key, missing_score, no_sibling };

struct ScoreLookup {
    LookupOutcome outcome = LookupOutcome::unknown_key;
    double value = std::numeric_limits<double>::quiet_NaN();
    bool imputed = false;
    std::string source_key;  // the record that actually carried the score

    bool ok() const { return outcome == LookupOutcome::found; }
};

// Frozen, content-addressed score table. Load-time validation is strict on
// purpose: every downstream number inherits its meaning from this file, so a
// malformed row must never make it into a run.
class CapabilityTable {
  public:
    static constexpr long kSiblingWindowDays = 90;

    // Expected CSV column order. An optional leading '#' line may carry
    // snapshot=<id> eci_min=<lo> eci_max=<hi> metadata.
    static const std::vector<std::string>& columns() {
        static const std::vector<std::string> cols = {
            "canonical_key", "family",  "tier",
            "release_date",  "eci",     "arena_elo",
            "aa_index",      "price_in", "price_out",
            "is_frontier_tier", "reasoning_capable", "reasoning_available_date",
            "tool_capable",  "aliases"};
        return cols;
    }

    static CapabilityTable load(const std::string& csv_path) {
        std::string bytes = detail::read_file(csv_path);
        std::optional<std::string> expected;
        std::string companion = csv_path + ".sha256";
        if (std::filesystem::exists(companion))
            expected = detail::trim(detail::read_file(companion).substr(0, 64));
        std::string stem = std::filesystem::path(csv_path).stem().string();
        return from_csv(bytes, stem, expected);
    }

    static CapabilityTable from_csv(const std::string& bytes, const std::string& default_snapshot,
                                    const std::optional<std::string>& expected_sha = std::nullopt) {
        CapabilityTable table;
        table.content_hash_ = detail::sha256_hex(bytes);
        if (expected_sha && *expected_sha != table.content_hash_)
            throw IntegrityError("capability table digest mismatch: expected " + *expected_sha +
                                 ", file hashes to " + table.content_hash_);
        table.snapshot_id_ = default_snapshot;

        std::string body = bytes;
        if (detail::starts_with(body, "#")) {
            size_t nl = body.find('\n');
            std::string meta = body.substr(1, nl == std::string::npos ? std::string::npos : nl - 1);
            body = nl == std::string::npos ? "" : body.substr(nl + 1);
            for (const auto& tok : detail::split(detail::trim(meta), ' ')) {
                auto kv = detail::split(tok, '=');
                if (kv.size() != 2) continue;
                if (kv[0] == "snapshot")
                    table.snapshot_id_ = kv[1];
                else if (kv[0] == "eci_min")
                    table.eci_min_ = std::stod(kv[1]);
                else if (kv[0] == "eci_max")
                    table.eci_max_ = std::stod(kv[1]);
            }
        }

        auto rows = detail::parse_csv(body);
        if (rows.empty()) throw ParseError("capability table has no header row");
        if (rows[0] != columns())
            throw ParseError("capability table header does not match the expected columns");

        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() != columns().size())
                throw ParseError("capability table row " + std::to_string(r + 1) + " has " +
                                 std::to_string(row.size()) + " cells, expected " +
                                 std::to_string(columns().size()));
            table.append_row(row, r + 1);
        }
        table.index();
        return table;
    }

    const std::vector<ModelRecord>& records() const { return records_; }
    const std::string& snapshot_id() const { return snapshot_id_; }
    const std::string& content_hash() const { return content_hash_; }

    const ModelRecord* find(const std::string& key) const {
        auto it = by_key_.find(key);
        return it == by_key_.end() ? nullptr : &records_[it->second];
    }

    const ModelRecord& at(const std::string& key) const {
        const ModelRecord* rec = find(key);
        if (!rec) throw LookupError("unknown model key '" + key + "'");
        return *rec;
    }

    bool has_alias(const std::string& alias) const { return alias_to_key_.count(alias) > 0; }

    // Alias resolution local to the table file. The resolver module layers
    // fuzzier matching on top; this map is exact-token only.
    std::optional<std::string> key_for_alias(const std::string& alias) const {
        auto it = alias_to_key_.find(alias);
        if (it != alias_to_key_.end()) return it->second;
        if (by_key_.count(alias)) return alias;
        return std::nullopt;
    }

    ScoreLookup lookup_score(const std::string& key, Scale scale,
                             LookupPolicy policy = LookupPolicy::strict,
                             long sibling_window_days = kSiblingWindowDays) const {
        const ModelRecord* rec = find(key);
        if (!rec)
            return {LookupOutcome::unknown_key, std::numeric_limits<double>::quiet_NaN(), false,
                    ""};
        if (auto direct = rec->score(scale))
            return {LookupOutcome::found, *direct, false, rec->canonical_key};
        if (policy == LookupPolicy::strict)
            return {LookupOutcome::missing_score, std::numeric_limits<double>::quiet_NaN(), false,
                    rec->canonical_key};

        // Sibling imputation: nearest same-family same-tier release within the
        // window that carries a direct score. Single hop by construction,
        // because only direct scores can donate.
        const ModelRecord* best = nullptr;
        long best_dist = sibling_window_days + 1;
        for (const auto& cand : records_) {
            if (cand.canonical_key == rec->canonical_key) continue;
            if (cand.family != rec->family || cand.tier != rec->tier) continue;
            if (!cand.score(scale)) continue;
            long dist = std::labs(cand.release_date.days_since(rec->release_date));
            if (dist > sibling_window_days) continue;
            if (!best || dist < best_dist ||
                (dist == best_dist && (cand.release_date < best->release_date ||
                                       (cand.release_date == best->release_date &&
                                        cand.canonical_key < best->canonical_key)))) {
                best = &cand;
                best_dist = dist;
            }
        }
        if (!best)
            return {LookupOutcome::no_sibling, std::numeric_limits<double>::quiet_NaN(), false,
                    rec->canonical_key};
        return {LookupOutcome::found, *best->score(scale), true, best->canonical_key};
    }

    std::vector<const ModelRecord*> family_members(const std::string& family) const {
        std::vector<const ModelRecord*> out;
        for (const auto& rec : records_)
            if (rec.family == family) out.push_back(&rec);
        return out;
    }

  private:
    void append_row(const std::vector<std::string>& row, size_t line) {
        ModelRecord rec;
        auto cell = [&](size_t i) { return detail::trim(row[i]); };
        auto where = [&] { return " (table line " + std::to_string(line) + ")"; };

        rec.canonical_key = cell(0);
        if (rec.canonical_key.empty()) throw ValidationError("empty canonical_key" + where());
        rec.family = cell(1);
        rec.tier = cell(2);
        if (rec.family.empty() || rec.tier.empty())
            throw ValidationError("empty family or tier for '" + rec.canonical_key + "'" + where());
        rec.release_date = Date::parse(cell(3));

        rec.scores[0] = parse_score(cell(4), rec.canonical_key, Scale::eci);
        rec.scores[1] = parse_score(cell(5), rec.canonical_key, Scale::arena_elo);
        rec.scores[2] = parse_score(cell(6), rec.canonical_key, Scale::aa_index);
        if (rec.scores[0] && (*rec.scores[0] <= eci_min_ || *rec.scores[0] >= eci_max_))
            throw ValidationError("eci score " + std::to_string(*rec.scores[0]) + " for '" +
                                  rec.canonical_key + "' falls outside the declared interval (" +
                                  std::to_string(eci_min_) + ", " + std::to_string(eci_max_) + ")");

        rec.price_in = parse_price(cell(7), rec.canonical_key, "price_in");
        rec.price_out = parse_price(cell(8), rec.canonical_key, "price_out");
        rec.is_frontier_tier = parse_bool(cell(9), where());
        rec.reasoning_capable = parse_bool(cell(10), where());
        if (!cell(11).empty()) {
            if (!rec.reasoning_capable)
                throw ValidationError("reasoning_available_date set for non-reasoning model '" +
                                      rec.canonical_key + "'");
            rec.reasoning_available_date = Date::parse(cell(11));
        }
        rec.tool_capable = parse_bool(cell(12), where());
        if (!cell(13).empty())
            for (auto& alias : detail::split(cell(13), '|'))
                if (!detail::trim(alias).empty()) rec.aliases.push_back(detail::trim(alias));

        records_.push_back(std::move(rec));
    }

    std::optional<double> parse_score(const std::string& cell, const std::string& key,
                                      Scale scale) {
        if (cell.empty()) return std::nullopt;
        size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size())
            throw ParseError("unparseable " + std::string(scale_name(scale)) + " score '" + cell +
                             "' for '" + key + "'");
        if (!std::isfinite(v))
            throw ValidationError("non-finite " + std::string(scale_name(scale)) + " score for '" +
                                  key + "'");
        if (integer_grade(scale) && cell.find_first_of(".eE") != std::string::npos)
            throw ValidationError("integer-grade scale " + std::string(scale_name(scale)) +
                                  " got non-integer cell '" + cell + "' for '" + key + "'");
        return v;
    }

    std::optional<double> parse_price(const std::string& cell, const std::string& key,
                                      const char* field) {
        if (cell.empty()) return std::nullopt;
        double v = std::stod(cell);
        if (!(v > 0.0))
            throw ValidationError(std::string(field) + " must be positive for '" + key + "'");
        return v;
    }

    static bool parse_bool(const std::string& cell, const std::string& where) {
        if (cell == "true" || cell == "1") return true;
        if (cell == "false" || cell == "0") return false;
        throw ParseError("expected boolean cell, got '" + cell + "'" + where);
    }

    void index() {
        for (size_t i = 0; i < records_.size(); ++i) {
            const auto& rec = records_[i];
            if (!by_key_.emplace(rec.canonical_key, i).second)
                throw ValidationError("duplicate canonical_key '" + rec.canonical_key + "'");
        }
        for (const auto& rec : records_) {
            for (const auto& alias : rec.aliases) {
                if (by_key_.count(alias))
                    throw ValidationError("alias '" + alias + "' collides with a canonical key");
                if (!alias_to_key_.emplace(alias, rec.canonical_key).second)
                    throw ValidationError("alias '" + alias + "' appears under two models");
            }
        }
    }

    std::vector<ModelRecord> records_;
    std::map<std::string, size_t> by_key_;
    std::map<std::string, std::string> alias_to_key_;
    std::string snapshot_id_;
    std::string content_hash_;
    double eci_min_ = 0.0;
    double eci_max_ = 1000.0;
};

}  // namespace frontier_audit
