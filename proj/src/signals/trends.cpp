#include <algorithm>
#include <cmath>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"

namespace pulse::signals {

std::vector<Point> normalize_interest(std::span<const Point> shares) {
  double peak = 0.0;
  for (const auto& p : shares) {
    if (!std::isfinite(p.value)) throw Error(Errc::non_finite, "search share must be finite");
    if (p.value < 0) throw Error(Errc::negative_share, "negative search share on " + p.date.iso());
    peak = std::max(peak, p.value);
  }
  std::vector<Point> out;
  out.reserve(shares.size());
  for (const auto& p : shares) {
    const double v = peak > 0 ? std::floor(100.0 * (p.value / peak) + 0.5) : 0.0;
    out.push_back({p.date, v});
  }
  return out;
}

std::vector<SignalSeries> load_trends(std::istream& in, const std::optional<std::string>& region) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(Errc::empty_input, "trends file is empty");
  const csv::Header header(row);
  const auto kw_col = header.find("keyword");
  const auto region_col = header.find("region");
  const auto date_col = header.find("date");
  const auto share_col = header.find("share");
  if (!kw_col || !region_col || !date_col || !share_col) {
    throw Error(Errc::invalid_argument, "trends file needs keyword,region,date,share columns");
  }

  std::map<std::pair<std::string, std::string>, std::map<Date, double>> groups;
  while (reader.next(row)) {
    const auto where = "trends file line " + std::to_string(reader.line_number());
    if (row.size() != header.size()) throw Error(Errc::invalid_argument, where + ": wrong column count");
    const auto keyword = text::to_lower(text::trim(row[*kw_col]));
    const std::string reg(text::trim(row[*region_col]));
    if (region && !text::iequals(reg, *region)) continue;
    auto date = Date::parse_any(text::trim(row[*date_col]));
    if (!date) throw Error(Errc::invalid_argument, where + ": bad date");
    auto share = text::parse_double(row[*share_col]);
    if (!share) throw Error(Errc::invalid_argument, where + ": bad share '" + row[*share_col] + "'");
    if (*share < 0) throw Error(Errc::negative_share, where + ": negative share");
    if (!groups[{keyword, reg}].emplace(*date, *share).second) {
      throw Error(Errc::duplicate_date, where + ": duplicate date " + date->iso());
    }
  }

  std::vector<SignalSeries> out;
  for (const auto& [key, points] : groups) {
    std::vector<Point> shares;
    shares.reserve(points.size());
    for (auto [d, v] : points) shares.push_back({d, v});
    out.push_back({SignalKind::trends_interest, key.second, key.first, normalize_interest(shares)});
  }
  return out;
}

}  // namespace pulse::signals
