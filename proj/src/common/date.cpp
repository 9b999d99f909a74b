#include "common/date.hpp"

#include <charconv>
#include <cstdio>

namespace pulse {

namespace {

bool parse_uint(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::optional<Date> make(int y, int m, int d) {
  using namespace std::chrono;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date::from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

}  // namespace

std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
      !parse_uint(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  return make(y, m, d);
}

std::optional<Date> Date::parse_compact(std::string_view text) {
  if (text.size() != 8) return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(4, 2), m) ||
      !parse_uint(text.substr(6, 2), d)) {
    return std::nullopt;
  }
  return make(y, m, d);
}

std::optional<Date> Date::parse_any(std::string_view text) {
  if (auto d = parse_iso(text)) return d;
  if (auto d = parse_compact(text)) return d;

  // M/D/YY or M/D/YYYY
  const auto s1 = text.find('/');
  if (s1 == std::string_view::npos) return std::nullopt;
  const auto s2 = text.find('/', s1 + 1);
  if (s2 == std::string_view::npos) return std::nullopt;
  int m = 0, d = 0, y = 0;
  const auto ys = text.substr(s2 + 1);
  if (!parse_uint(text.substr(0, s1), m) || !parse_uint(text.substr(s1 + 1, s2 - s1 - 1), d) ||
      !parse_uint(ys, y)) {
    return std::nullopt;
  }
  if (ys.size() == 2) {
    y += 2000;
  } else if (ys.size() != 4) {
    return std::nullopt;
  }
  return make(y, m, d);
}

std::chrono::year_month_day Date::ymd() const {
  return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
}

std::string Date::iso() const {
  const auto v = ymd();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(v.year()),
                static_cast<unsigned>(v.month()), static_cast<unsigned>(v.day()));
  return buf;
}

unsigned Date::iso_weekday() const {
  return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{days_}}}.iso_encoding();
}

Date Date::week_start() const {
  return Date(days_ - static_cast<std::int32_t>(iso_weekday() - 1));
}

}  // namespace pulse
