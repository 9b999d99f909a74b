#include <cmath>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"

namespace pulse::signals {

namespace {

struct RawRow {
  std::string state;
  std::string indicator;
  double value;
  bool is_count;
  std::size_t line;
};

// Drops thousands separators, a trailing '%', and surrounding blanks.
std::optional<double> parse_noisy_number(std::string_view cell) {
  std::string cleaned;
  for (char c : text::trim(cell)) {
    if (c != ',' && c != '%' && c != ' ') cleaned.push_back(c);
  }
  return text::parse_double(cleaned);
}

}  // namespace

std::optional<double> DemographicTable::get(std::string_view state, std::string_view indicator) const {
  auto it = values.find({std::string(state), std::string(indicator)});
  if (it == values.end()) return std::nullopt;
  return it->second;
}

DemographicTable load_demographics(std::istream& in, const std::optional<std::string>& region) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw Error(Errc::empty_input, "demographics file is empty");
  const csv::Header header(row);
  const auto state_col = header.find("state");
  const auto ind_col = header.find("indicator");
  const auto value_col = header.find("value");
  const auto unit_col = header.find("unit");
  if (!state_col || !ind_col || !value_col || !unit_col) {
    throw Error(Errc::invalid_argument, "demographics file needs state,indicator,value,unit columns");
  }

  DemographicTable table;
  std::vector<RawRow> rows;
  while (reader.next(row)) {
    const auto where = "demographics file line " + std::to_string(reader.line_number());
    if (row.size() != header.size()) throw Error(Errc::invalid_argument, where + ": wrong column count");
    std::string state(text::trim(row[*state_col]));
    std::string indicator = text::to_lower(text::trim(row[*ind_col]));
    if (state.empty() || indicator.empty()) continue;
    if (region && !text::iequals(state, *region)) continue;
    const auto value_cell = text::trim(row[*value_col]);
    if (value_cell.empty()) continue;  // missing measurement
    auto value = parse_noisy_number(value_cell);
    if (!value) throw Error(Errc::invalid_argument, where + ": bad value '" + std::string(value_cell) + "'");
    const auto unit = text::to_lower(text::trim(row[*unit_col]));
    bool is_count;
    if (unit == "count") {
      is_count = true;
    } else if (unit == "percent" || unit == "%") {
      is_count = false;
    } else {
      throw Error(Errc::invalid_argument, where + ": unit must be count or percent, got '" + unit + "'");
    }
    if (indicator == "population") {
      if (!is_count || *value <= 0) throw Error(Errc::invalid_argument, where + ": population must be a positive count");
      if (!table.population.emplace(state, *value).second) {
        throw Error(Errc::invalid_argument, where + ": population for " + state + " given twice");
      }
      continue;
    }
    rows.push_back({std::move(state), std::move(indicator), *value, is_count, reader.line_number()});
  }

  for (const auto& r : rows) {
    const auto where = "demographics file line " + std::to_string(r.line);
    double pct = r.value;
    if (r.is_count) {
      auto pop = table.population.find(r.state);
      if (pop == table.population.end()) {
        throw Error(Errc::missing_population, where + ": " + r.state + " has counts but no population row");
      }
      pct = 100.0 * r.value / pop->second;
    }
    if (!(pct >= 0.0 && pct <= 100.0)) {
      throw Error(Errc::percent_out_of_range, where + ": " + r.indicator + " for " + r.state + " is " +
                                                  text::format_double(pct) + "%");
    }
    if (!table.values.emplace(std::pair{r.state, r.indicator}, pct).second) {
      throw Error(Errc::invalid_argument, where + ": " + r.indicator + " for " + r.state + " given twice");
    }
  }

  std::map<std::pair<std::string, std::string>, double> group_sums;
  for (const auto& [key, pct] : table.values) {
    const auto colon = key.second.find(':');
    if (colon == std::string::npos) continue;
    group_sums[{key.first, key.second.substr(0, colon)}] += pct;
  }
  for (const auto& [key, sum] : group_sums) {
    if (std::abs(sum - 100.0) > kShareGroupTolerance) {
      throw Error(Errc::share_group_mismatch, key.second + " shares for " + key.first + " sum to " +
                                                  text::format_double(sum) + "%");
    }
  }
  return table;
}

}  // namespace pulse::signals
