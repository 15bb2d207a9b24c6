#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "capability_table.hpp"
#include "detail/dates.hpp"
#include "errors.hpp"
#include "scales.hpp"

namespace frontier_audit {

// No scored model exists on or before the queried date (or in the queried
// domain-year cell).
struct EmptyFrontier : Error {
    using Error::Error;
};

// Deployment variant asked for a price cap but no base-tier model released by
// the queried date carries an input price.
struct NoPricedBase : Error {
    using Error::Error;
};

enum class FrontierVariant : unsigned char { absolute, deployment, domain_relative };

inline std::string_view frontier_variant_name(FrontierVariant v) {
    switch (v) {
        case FrontierVariant::absolute:
            return "absolute";
        case FrontierVariant::deployment:
            return "deployment";
        case FrontierVariant::domain_relative:
            return "domain_relative";
    }
    return "?";
}

inline FrontierVariant parse_frontier_variant(std::string_view token) {
    if (token == "absolute") return FrontierVariant::absolute;
    if (token == "deployment") return FrontierVariant::deployment;
    if (token == "domain_relative" || token == "domain-relative")
        return FrontierVariant::domain_relative;
    throw ConfigError("unknown frontier variant '" + std::string(token) +
                      "' (expected absolute|deployment|domain_relative)");
}

// Which models a given domain's corpus actually evaluated, bucketed by
// calendar year. Feeds the domain-relative frontier variant.
class DomainEvalIndex {
  public:
    void add(const std::string& domain, int year, const std::string& key) {
        cells_[{domain, year}].insert(key);
    }

    const std::set<std::string>* models(const std::string& domain, int year) const {
        auto it = cells_.find({domain, year});
        return it == cells_.end() ? nullptr : &it->second;
    }

    bool empty() const { return cells_.empty(); }

  private:
    std::map<std::pair<std::string, int>, std::set<std::string>> cells_;
};

struct FrontierQuery {
    FrontierVariant variant = FrontierVariant::absolute;
    // Deployment cap: eligible when price_in <= price_multiple x the cheapest
    // base-tier input price available on the date.
    double price_multiple = 10.0;
    const DomainEvalIndex* domain_index = nullptr;
    std::string domain;
};

struct FrontierPoint {
    std::string key;
    double score = 0.0;
    // Deployment variant only: scored candidates dropped because they carry
    // no input price and therefore cannot be tested against the cap.
    int skipped_unpriced = 0;
};

namespace detail {

// Shared argmax tie-break: higher score, then earlier release, then key order.
inline bool frontier_better(const ModelRecord& cand, double cand_score, const ModelRecord* best,
                            double best_score) {
    if (!best) return true;
    if (cand_score != best_score) return cand_score > best_score;
    if (cand.release_date != best->release_date) return cand.release_date < best->release_date;
    return cand.canonical_key < best->canonical_key;
}

}  // namespace detail

// Day-resolution frontier. The monthly trajectory below is a sampled view of
// this primitive at month ends.
inline FrontierPoint frontier_at(const CapabilityTable& table, Scale scale, Date date,
                                 const FrontierQuery& query = {}) {
    std::optional<double> price_cap;
    if (query.variant == FrontierVariant::deployment) {
        std::optional<double> min_base;
        for (const auto& rec : table.records()) {
            if (rec.is_frontier_tier || rec.release_date > date || !rec.price_in) continue;
            if (!min_base || *rec.price_in < *min_base) min_base = *rec.price_in;
        }
        if (!min_base)
            throw NoPricedBase("no priced base-tier model released by " + date.iso());
        price_cap = *min_base * query.price_multiple;
    }

    const std::set<std::string>* domain_set = nullptr;
    if (query.variant == FrontierVariant::domain_relative) {
        if (!query.domain_index)
            throw ConfigError("domain-relative frontier needs a domain eval index");
        domain_set = query.domain_index->models(query.domain, date.year());
        if (!domain_set)
            throw EmptyFrontier("no models evaluated in domain '" + query.domain + "' during " +
                                std::to_string(date.year()));
    }

    const ModelRecord* best = nullptr;
    double best_score = 0.0;
    int skipped = 0;
    for (const auto& rec : table.records()) {
        auto score = rec.score(scale);
        if (!score) continue;
        if (domain_set) {
            if (!domain_set->count(rec.canonical_key)) continue;
        } else if (rec.release_date > date) {
            continue;
        }
        if (price_cap) {
            if (!rec.price_in) {
                ++skipped;
                continue;
            }
            if (*rec.price_in > *price_cap) continue;
        }
        if (detail::frontier_better(rec, *score, best, best_score)) {
            best = &rec;
            best_score = *score;
        }
    }
    if (!best)
        throw EmptyFrontier("no scored model qualifies for the " +
                            std::string(frontier_variant_name(query.variant)) + " frontier at " +
                            date.iso());
    return {best->canonical_key, best_score, skipped};
}

struct TrajectoryValue {
    double score = 0.0;
    std::string key;
    // True when the query date lies past the built range and the last step
    // was held flat to answer it.
    bool extrapolated = false;
};

// Monthly step function over a closed month range. Each step holds the
// frontier among models released by the end of that calendar month.
class FrontierTrajectory {
  public:
    struct Step {
        long month_index = 0;  // months since year 0, from Date::month_index
        std::string key;
        double score = 0.0;
    };

    static FrontierTrajectory build(const CapabilityTable& table, Scale scale, Date start,
                                    Date end, const FrontierQuery& query = {}) {
        if (end < start) throw ConfigError("trajectory range runs backwards");
        FrontierTrajectory traj;
        traj.scale_ = scale;
        traj.variant_ = query.variant;
        for (long mi = start.month_index(); mi <= end.month_index(); ++mi) {
            Date month_end = Date::from_month_index(mi + 1).minus_days(1);
            FrontierPoint p = frontier_at(table, scale, month_end, query);
            traj.steps_.push_back({mi, p.key, p.score});
        }
        return traj;
    }

    Scale scale() const { return scale_; }
    FrontierVariant variant() const { return variant_; }
    const std::vector<Step>& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }

    Date start_month() const {
        require_nonempty();
        return Date::from_month_index(steps_.front().month_index);
    }
    Date end_month() const {
        require_nonempty();
        return Date::from_month_index(steps_.back().month_index);
    }

    const Step& step_for(Date date) const {
        require_nonempty();
        long mi = date.month_index();
        if (mi < steps_.front().month_index)
            throw LookupError("date " + date.iso() + " precedes the trajectory start");
        size_t offset = static_cast<size_t>(mi - steps_.front().month_index);
        if (offset >= steps_.size())
            throw LookupError("date " + date.iso() + " lies past the trajectory end");
        return steps_[offset];
    }

    TrajectoryValue value_at(Date date) const {
        require_nonempty();
        long mi = date.month_index();
        if (mi < steps_.front().month_index)
            throw LookupError("date " + date.iso() + " precedes the trajectory start");
        if (mi > steps_.back().month_index) {
            const Step& last = steps_.back();
            return {last.score, last.key, true};
        }
        const Step& s = steps_[static_cast<size_t>(mi - steps_.front().month_index)];
        return {s.score, s.key, false};
    }

    // month,key,score with months rendered as YYYY-MM.
    std::string to_csv() const {
        std::string out = "month,key,score\n";
        char month_buf[16];
        char score_buf[64];
        for (const auto& s : steps_) {
            Date first = Date::from_month_index(s.month_index);
            std::snprintf(month_buf, sizeof month_buf, "%04d-%02d", first.year(), first.month());
            std::snprintf(score_buf, sizeof score_buf, "%.10g", s.score);
            out += detail::csv_row({month_buf, s.key, score_buf});
        }
        return out;
    }

    static FrontierTrajectory from_csv(const std::string& bytes, Scale scale,
                                       FrontierVariant variant) {
        auto rows = detail::parse_csv(bytes);
        if (rows.empty()) throw ParseError("trajectory file has no header row");
        const std::vector<std::string> expect = {"month", "key", "score"};
        if (rows[0] != expect)
            throw ParseError("trajectory header does not match expected columns");
        FrontierTrajectory traj;
        traj.scale_ = scale;
        traj.variant_ = variant;
        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() != expect.size())
                throw ParseError("trajectory row " + std::to_string(r + 1) +
                                 " has wrong cell count");
            Step s;
            s.month_index = parse_month(detail::trim(row[0]));
            s.key = detail::trim(row[1]);
            s.score = std::stod(row[2]);
            if (!traj.steps_.empty()) {
                long prev = traj.steps_.back().month_index;
                if (s.month_index != prev + 1)
                    throw ValidationError("trajectory months must advance one step per row, got " +
                                          detail::trim(row[0]));
                if (variant == FrontierVariant::absolute &&
                    s.score < traj.steps_.back().score)
                    throw ValidationError(
                        "absolute trajectory score decreases at " + detail::trim(row[0]) +
                        ", which the growing candidate set forbids");
            }
            traj.steps_.push_back(std::move(s));
        }
        if (traj.steps_.empty()) throw ValidationError("trajectory file carries no steps");
        return traj;
    }

  private:
    void require_nonempty() const {
        if (steps_.empty()) throw LookupError("trajectory has no steps");
    }

    static long parse_month(const std::string& text) {
        auto parts = detail::split(text, '-');
        if (parts.size() != 2 || parts[0].size() != 4 || parts[1].size() != 2)
            throw ParseError("expected month as YYYY-MM, got '" + text + "'");
        Date first(std::stoi(parts[0]), static_cast<unsigned>(std::stoi(parts[1])), 1);
        return first.month_index();
    }

    Scale scale_ = Scale::eci;
    FrontierVariant variant_ = FrontierVariant::absolute;
    std::vector<Step> steps_;
};

}  // namespace frontier_audit
