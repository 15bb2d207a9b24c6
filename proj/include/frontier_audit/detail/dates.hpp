#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>

#include "../errors.hpp"

namespace frontier_audit {

// Calendar date on the proleptic Gregorian calendar, UTC, day resolution.
// Thin wrapper over std::chrono::sys_days so arithmetic stays in the
// type system instead of in ad-hoc integer math at call sites.
class Date {
  public:
    Date() = default;
    explicit Date(std::chrono::sys_days d) : days_(d) {}

    Date(int year, unsigned month, unsigned day)
        : days_(std::chrono::sys_days{std::chrono::year{year} / std::chrono::month{month} /
                                      std::chrono::day{day}}) {
        auto ymd = std::chrono::year_month_day{days_};
        if (!ymd.ok() || static_cast<int>(ymd.year()) != year ||
            static_cast<unsigned>(ymd.month()) != month || static_cast<unsigned>(ymd.day()) != day)
            throw ValidationError("invalid calendar date: " + std::to_string(year) + "-" +
                                  std::to_string(month) + "-" + std::to_string(day));
    }

    static Date parse(const std::string& iso) {
        auto parsed = try_parse(iso);
        if (!parsed) throw ParseError("expected YYYY-MM-DD, got '" + iso + "'");
        return *parsed;
    }

    static std::optional<Date> try_parse(const std::string& iso) {
        if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
        for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
            if (iso[i] < '0' || iso[i] > '9') return std::nullopt;
        int y = std::stoi(iso.substr(0, 4));
        unsigned m = static_cast<unsigned>(std::stoi(iso.substr(5, 2)));
        unsigned d = static_cast<unsigned>(std::stoi(iso.substr(8, 2)));
        auto ymd = std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
        if (!ymd.ok()) return std::nullopt;
        return Date(std::chrono::sys_days{ymd});
    }

    std::string iso() const {
        auto ymd = std::chrono::year_month_day{days_};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    int year() const { return static_cast<int>(std::chrono::year_month_day{days_}.year()); }
    unsigned month() const {
        return static_cast<unsigned>(std::chrono::year_month_day{days_}.month());
    }
    unsigned day() const { return static_cast<unsigned>(std::chrono::year_month_day{days_}.day()); }

    Date plus_days(long n) const { return Date(days_ + std::chrono::days{n}); }
    Date minus_days(long n) const { return plus_days(-n); }

    // Signed whole days from other to *this.
    long days_since(Date other) const { return (days_ - other.days_).count(); }

    // Months since year 0, for monthly step grids.
    long month_index() const { return static_cast<long>(year()) * 12 + (month() - 1); }

    // First day of the month this date falls in.
    Date month_floor() const { return Date(year(), month(), 1); }

    static Date from_month_index(long idx) {
        long y = idx / 12, m = idx % 12;
        if (m < 0) {
            m += 12;
            --y;
        }
        return Date(static_cast<int>(y), static_cast<unsigned>(m + 1), 1);
    }

    std::chrono::sys_days raw() const { return days_; }

    auto operator<=>(const Date&) const = default;

  private:
    std::chrono::sys_days days_{};
};

}  // namespace frontier_audit
