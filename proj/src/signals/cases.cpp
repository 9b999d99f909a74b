#include <algorithm>
#include <cmath>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"

namespace pulse::signals {

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::cases_cumulative: return "cases_cumulative";
    case SignalKind::deaths_cumulative: return "deaths_cumulative";
    case SignalKind::cases_new: return "cases_new";
    case SignalKind::deaths_new: return "deaths_new";
    case SignalKind::mobility_change: return "mobility_change";
    case SignalKind::distancing_reduction: return "distancing_reduction";
    case SignalKind::trends_interest: return "trends_interest";
  }
  return "unknown";
}

bool is_cumulative(SignalKind kind) {
  return kind == SignalKind::cases_cumulative || kind == SignalKind::deaths_cumulative;
}

void validate(const SignalSeries& s) {
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    if (i > 0 && !(s.points[i - 1].date < p.date)) {
      throw Error(Errc::duplicate_date, std::string(to_string(s.kind)) + " series for " + s.region +
                                            " has non-increasing date " + p.date.iso());
    }
    if (!std::isfinite(p.value)) throw Error(Errc::non_finite, "non-finite value in series " + s.region);
    if ((is_cumulative(s.kind) || s.kind == SignalKind::cases_new || s.kind == SignalKind::deaths_new) &&
        p.value < 0) {
      throw Error(Errc::invalid_argument, "negative count in series " + s.region + " on " + p.date.iso());
    }
    if (s.kind == SignalKind::trends_interest && (p.value < 0 || p.value > 100)) {
      throw Error(Errc::invalid_argument, "trends interest outside [0,100] in series " + s.region);
    }
  }
}

CaseLoad load_case_series(std::istream& in, SignalKind kind, const std::optional<std::string>& region) {
  if (!is_cumulative(kind)) {
    throw Error(Errc::wrong_kind, "case files load as cases_cumulative or deaths_cumulative");
  }
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(Errc::empty_input, "case file is empty");
  const csv::Header header(row);

  const std::size_t region_col = header.find("Province_State").value_or(0);
  std::vector<std::pair<Date, std::size_t>> date_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i == region_col) continue;
    if (auto d = Date::parse_any(header[i])) date_cols.emplace_back(*d, i);
  }
  if (date_cols.empty()) throw Error(Errc::empty_input, "case file has no date columns");
  std::sort(date_cols.begin(), date_cols.end());
  for (std::size_t i = 1; i < date_cols.size(); ++i) {
    if (date_cols[i].first == date_cols[i - 1].first) {
      throw Error(Errc::duplicate_date, "case file repeats date column " + date_cols[i].first.iso());
    }
  }

  // Region order of first appearance is irrelevant; output is sorted by name.
  std::map<std::string, std::vector<double>> totals;
  std::size_t data_rows = 0;
  while (reader.next(row)) {
    ++data_rows;
    if (row.size() != header.size()) {
      throw Error(Errc::invalid_argument,
                  "case file line " + std::to_string(reader.line_number()) + ": wrong column count");
    }
    const std::string name(text::trim(row[region_col]));
    if (name.empty()) continue;
    if (region && !text::iequals(name, *region)) continue;
    auto& acc = totals.try_emplace(name, date_cols.size(), 0.0).first->second;
    for (std::size_t j = 0; j < date_cols.size(); ++j) {
      auto v = text::parse_double(row[date_cols[j].second]);
      if (!v || *v < 0) {
        throw Error(Errc::invalid_argument, "case file line " + std::to_string(reader.line_number()) +
                                                ": bad count '" + row[date_cols[j].second] + "'");
      }
      acc[j] += *v;
    }
  }
  if (data_rows == 0) throw Error(Errc::empty_input, "case file has no data rows");

  if (!region && !totals.empty()) {
    const bool has_us = std::any_of(totals.begin(), totals.end(),
                                    [](const auto& kv) { return text::iequals(kv.first, "US"); });
    if (!has_us) {
      std::vector<double> us(date_cols.size(), 0.0);
      for (const auto& [name, values] : totals) {
        for (std::size_t j = 0; j < values.size(); ++j) us[j] += values[j];
      }
      totals.emplace("US", std::move(us));
    }
  }

  CaseLoad out;
  for (auto& [name, values] : totals) {
    SignalSeries s{kind, name, {}, {}};
    s.points.reserve(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j > 0 && values[j] < values[j - 1]) {
        out.warnings.push_back({name, date_cols[j].first, values[j - 1], values[j]});
      }
      s.points.push_back({date_cols[j].first, values[j]});
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

NewDaily new_daily(const SignalSeries& cumulative) {
  if (!is_cumulative(cumulative.kind)) {
    throw Error(Errc::wrong_kind, "new_daily needs a cumulative series, got " +
                                      std::string(to_string(cumulative.kind)));
  }
  NewDaily out;
  out.series.kind = cumulative.kind == SignalKind::cases_cumulative ? SignalKind::cases_new
                                                                    : SignalKind::deaths_new;
  out.series.region = cumulative.region;
  out.series.category = cumulative.category;
  out.series.points.reserve(cumulative.points.size());
  for (std::size_t i = 0; i < cumulative.points.size(); ++i) {
    const auto& p = cumulative.points[i];
    double v = i == 0 ? p.value : p.value - cumulative.points[i - 1].value;
    if (v < 0) {
      v = 0;
      ++out.clamps;
    }
    out.series.points.push_back({p.date, v});
  }
  return out;
}

}  // namespace pulse::signals
