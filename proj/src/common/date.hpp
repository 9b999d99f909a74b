#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pulse {

/// A UTC calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;

  static constexpr Date from_days(std::int32_t days) { return Date(days); }

  static constexpr Date from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const sys_days sd{year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                     std::chrono::day{day}}};
    return Date(static_cast<std::int32_t>(sd.time_since_epoch().count()));
  }

  // YYYY-MM-DD
  static std::optional<Date> parse_iso(std::string_view text);
  // YYYYMMDD (GKG style); trailing HHMMSS is not accepted here.
  static std::optional<Date> parse_compact(std::string_view text);
  // ISO, compact, or the M/D/YY and M/D/YYYY forms used in JHU headers.
  static std::optional<Date> parse_any(std::string_view text);

  constexpr std::int32_t days() const { return days_; }
  std::chrono::year_month_day ymd() const;
  std::string iso() const;

  /// 1 = Monday ... 7 = Sunday.
  unsigned iso_weekday() const;
  /// Monday of the ISO week containing this day.
  Date week_start() const;

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
  constexpr Date& operator++() {
    ++days_;
    return *this;
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  constexpr explicit Date(std::int32_t days) : days_(days) {}
  std::int32_t days_ = 0;
};

/// Inclusive day range.
struct DateRange {
  Date first;
  Date last;

  constexpr bool empty() const { return last < first; }
  constexpr bool contains(Date d) const { return first <= d && d <= last; }
  constexpr std::int32_t length() const { return empty() ? 0 : (last - first) + 1; }
};

}  // namespace pulse
