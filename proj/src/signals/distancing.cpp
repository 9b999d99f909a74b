#include <algorithm>
#include <cmath>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"

namespace pulse::signals {

char to_char(Grade g) {
  switch (g) {
    case Grade::A: return 'A';
    case Grade::B: return 'B';
    case Grade::C: return 'C';
    case Grade::D: return 'D';
    case Grade::F: return 'F';
  }
  return '?';
}

Grade grade_distancing(double reduction) {
  if (!std::isfinite(reduction)) throw Error(Errc::non_finite, "distancing reduction must be finite");
  const double decrease = -reduction;
  if (decrease >= 0.70) return Grade::A;
  if (decrease >= 0.55) return Grade::B;
  if (decrease >= 0.40) return Grade::C;
  if (decrease >= 0.25) return Grade::D;
  return Grade::F;
}

std::vector<SignalSeries> load_distancing(std::istream& in, const std::optional<std::string>& region) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(Errc::empty_input, "distancing file is empty");
  const csv::Header header(row);
  auto state_col = header.find("state");
  if (!state_col) state_col = header.find("region");
  const auto date_col = header.find("date");
  const auto value_col = header.find("reduction");
  if (!state_col || !date_col || !value_col) {
    throw Error(Errc::invalid_argument, "distancing file needs state,date,reduction columns");
  }

  std::map<std::string, std::map<Date, double>> by_state;
  while (reader.next(row)) {
    const auto where = "distancing file line " + std::to_string(reader.line_number());
    if (row.size() != header.size()) throw Error(Errc::invalid_argument, where + ": wrong column count");
    const std::string state(text::trim(row[*state_col]));
    if (region && !text::iequals(state, *region)) continue;
    auto date = Date::parse_any(text::trim(row[*date_col]));
    if (!date) throw Error(Errc::invalid_argument, where + ": bad date");
    auto value = text::parse_double(row[*value_col]);
    if (!value) throw Error(Errc::non_finite, where + ": bad reduction '" + row[*value_col] + "'");
    if (!by_state[state].emplace(*date, *value).second) {
      throw Error(Errc::duplicate_date, where + ": duplicate date " + date->iso() + " for " + state);
    }
  }

  std::vector<SignalSeries> out;
  for (auto& [state, points] : by_state) {
    SignalSeries s{SignalKind::distancing_reduction, state, {}, {}};
    for (auto [d, v] : points) s.points.push_back({d, v});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DistancingGrade> grade_series(const SignalSeries& distancing) {
  if (distancing.kind != SignalKind::distancing_reduction) {
    throw Error(Errc::wrong_kind, "grade_series needs a distancing_reduction series");
  }
  std::vector<DistancingGrade> out;
  out.reserve(distancing.points.size());
  for (const auto& p : distancing.points) {
    out.push_back({distancing.region, p.date, p.value, grade_distancing(p.value)});
  }
  return out;
}

}  // namespace pulse::signals
