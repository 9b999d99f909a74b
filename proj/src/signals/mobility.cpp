#include <algorithm>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"

namespace pulse::signals {

namespace {

double median(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::optional<std::string_view> category_for(std::string_view column) {
  static constexpr std::string_view kSuffix = "_percent_change_from_baseline";
  std::string name = text::to_lower(text::trim(column));
  if (name.size() > kSuffix.size() && name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
    name.resize(name.size() - kSuffix.size());
  }
  for (auto c : kMobilityCategories) {
    if (name == c) return c;
  }
  return std::nullopt;
}

}  // namespace

WeekdayBaseline compute_weekday_baseline(const SignalSeries& raw, DateRange window) {
  std::array<std::vector<double>, 7> buckets;
  for (const auto& p : raw.points) {
    if (window.contains(p.date)) buckets[p.date.iso_weekday() - 1].push_back(p.value);
  }
  static constexpr std::array<std::string_view, 7> kDays = {"Monday", "Tuesday", "Wednesday", "Thursday",
                                                           "Friday", "Saturday", "Sunday"};
  WeekdayBaseline out{};
  for (std::size_t i = 0; i < 7; ++i) {
    if (buckets[i].empty()) {
      throw Error(Errc::missing_weekday, "baseline window " + window.first.iso() + ".." +
                                             window.last.iso() + " has no " + std::string(kDays[i]));
    }
    out[i] = median(buckets[i]);
  }
  return out;
}

std::vector<SignalSeries> load_mobility(std::istream& in, const std::optional<std::string>& region) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(Errc::empty_input, "mobility file is empty");
  const csv::Header header(row);
  const auto region_col = header.find("region");
  const auto date_col = header.find("date");
  if (!region_col || !date_col) throw Error(Errc::invalid_argument, "mobility file needs region,date columns");

  std::vector<std::pair<std::size_t, std::string_view>> cat_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i == *region_col || i == *date_col) continue;
    auto cat = category_for(header[i]);
    if (!cat) throw Error(Errc::unknown_category, "unknown mobility category column '" + header[i] + "'");
    cat_cols.emplace_back(i, *cat);
  }

  std::map<std::string, std::map<Date, bool>> seen;
  std::map<std::pair<std::string, std::string>, std::vector<Point>> series;
  while (reader.next(row)) {
    const auto where = "mobility file line " + std::to_string(reader.line_number());
    if (row.size() != header.size()) throw Error(Errc::invalid_argument, where + ": wrong column count");
    const std::string reg(text::trim(row[*region_col]));
    if (region && !text::iequals(reg, *region)) continue;
    auto date = Date::parse_any(text::trim(row[*date_col]));
    if (!date) throw Error(Errc::invalid_argument, where + ": bad date");
    if (!seen[reg].emplace(*date, true).second) {
      throw Error(Errc::duplicate_date, where + ": duplicate date " + date->iso() + " for " + reg);
    }
    for (auto [col, cat] : cat_cols) {
      const auto cell = text::trim(row[col]);
      if (cell.empty()) continue;
      auto v = text::parse_double(cell);
      if (!v) throw Error(Errc::invalid_argument, where + ": bad value '" + std::string(cell) + "'");
      series[{reg, std::string(cat)}].push_back({*date, *v});
    }
  }

  std::vector<SignalSeries> out;
  for (auto& [key, points] : series) {
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.date < b.date; });
    out.push_back({SignalKind::mobility_change, key.first, key.second, std::move(points)});
  }
  return out;
}

}  // namespace pulse::signals
