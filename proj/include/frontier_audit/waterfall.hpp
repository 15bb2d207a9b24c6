#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "detail/csv.hpp"
#include "detail/strings.hpp"
#include "errors.hpp"

namespace frontier_audit {

// One attenuation step: a benchmark score before and after removing a single
// ingredient of the original evaluation setup. "measured" chips come from an
// actual rerun; "bounded" chips are literature-derived bounds and carry their
// caveat along.
struct Chip {
    std::string label;
    double before = 0.0;
    double after = 0.0;
    std::string kind;    // "measured" | "bounded"
    std::string caveat;  // empty when none

    double retained_fraction() const {
        if (!(before > 0.0) || !(after > 0.0))
            throw ValidationError("chip '" + label + "' needs positive before/after scores");
        return after / before;
    }
};

class ChipSequence {
  public:
    ChipSequence() = default;
    explicit ChipSequence(std::vector<Chip> chips) : chips_(std::move(chips)) {}

    static ChipSequence from_csv_file(const std::string& path) {
        return from_csv(detail::read_file(path));
    }

    static ChipSequence from_csv(const std::string& bytes) {
        auto rows = detail::parse_csv(bytes);
        if (rows.empty()) throw ParseError("chip file has no header row");
        const std::vector<std::string> expect = {"label", "before", "after", "kind", "caveat"};
        if (rows[0] != expect) throw ParseError("chip file header does not match expected columns");
        std::vector<Chip> chips;
        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() != expect.size())
                throw ParseError("chip row " + std::to_string(r + 1) + " has wrong cell count");
            Chip chip;
            chip.label = detail::trim(row[0]);
            chip.before = std::stod(row[1]);
            chip.after = std::stod(row[2]);
            chip.kind = detail::trim(row[3]);
            chip.caveat = detail::trim(row[4]);
            if (chip.label.empty()) throw ValidationError("chip without a label");
            if (chip.kind != "measured" && chip.kind != "bounded")
                throw ValidationError("chip '" + chip.label + "' has unknown kind '" + chip.kind +
                                      "'");
            chip.retained_fraction();  // validates positivity
            chips.push_back(std::move(chip));
        }
        return ChipSequence(std::move(chips));
    }

    std::string to_csv() const {
        std::string out = "label,before,after,kind,caveat\n";
        char buf[64];
        for (const auto& c : chips_) {
            std::snprintf(buf, sizeof buf, "%.10g", c.before);
            std::string before = buf;
            std::snprintf(buf, sizeof buf, "%.10g", c.after);
            out += detail::csv_row({c.label, before, buf, c.kind, c.caveat});
        }
        return out;
    }

    const std::vector<Chip>& chips() const { return chips_; }
    bool empty() const { return chips_.empty(); }

    std::vector<double> retained_fractions() const {
        std::vector<double> out;
        out.reserve(chips_.size());
        for (const auto& c : chips_) out.push_back(c.retained_fraction());
        return out;
    }

    // Product of per-chip retained fractions. Order-independent by
    // construction; for a chained sequence it telescopes to final/baseline.
    double compound_total() const {
        if (chips_.empty()) throw ValidationError("compound_total of an empty chip sequence");
        double g = 1.0;
        for (const auto& c : chips_) g *= c.retained_fraction();
        return g;
    }

    // True when each chip starts where the previous one ended, which is the
    // precondition for reading the product as final/baseline.
    bool chained(double tol = 1e-9) const {
        for (size_t i = 1; i < chips_.size(); ++i)
            if (std::fabs(chips_[i].before - chips_[i - 1].after) > tol) return false;
        return true;
    }

    double baseline() const {
        if (chips_.empty()) throw ValidationError("baseline of an empty chip sequence");
        return chips_.front().before;
    }

    double final_score() const {
        if (chips_.empty()) throw ValidationError("final_score of an empty chip sequence");
        return chips_.back().after;
    }

  private:
    std::vector<Chip> chips_;
};

// Compounded survival of k independent steps each retaining fraction g.
inline double uniform_attenuation(double g, unsigned k) {
    if (!(g > 0.0) || g > 1.0) throw ValidationError("uniform_attenuation needs g in (0,1]");
    return std::pow(g, static_cast<double>(k));
}

}  // namespace frontier_audit
