#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common/date.hpp"

namespace pulse::signals {

enum class SignalKind {
  cases_cumulative,
  deaths_cumulative,
  cases_new,
  deaths_new,
  mobility_change,
  distancing_reduction,
  trends_interest,
};

std::string_view to_string(SignalKind kind);
bool is_cumulative(SignalKind kind);

struct Point {
  Date date;
  double value = 0.0;

  bool operator==(const Point&) const = default;
};

struct SignalSeries {
  SignalKind kind = SignalKind::cases_cumulative;
  std::string region;
  std::string category;  // mobility category or trends keyword; empty otherwise
  std::vector<Point> points;
};

/// Throws if dates are not strictly increasing or a kind-specific value bound
/// is violated.
void validate(const SignalSeries& series);

// --- case series ---------------------------------------------------------

struct NonMonotoneWarning {
  std::string region;
  Date date;
  double previous = 0.0;
  double value = 0.0;
};

struct CaseLoad {
  std::vector<SignalSeries> series;  // sorted by region
  std::vector<NonMonotoneWarning> warnings;
};

/// Wide cumulative CSV: a region column followed by one column per date.
/// The region column is "Province_State" when present (JHU layout, rows summed
/// per state), otherwise the first column. Columns whose header is not a date
/// are ignored. A "US" series is added as the sum of all regions unless the
/// file provides one or a region filter is active.
CaseLoad load_case_series(std::istream& in, SignalKind kind,
                          const std::optional<std::string>& region = std::nullopt);

struct NewDaily {
  SignalSeries series;
  std::size_t clamps = 0;
};

/// First differences of a cumulative series; negatives clamp to zero.
NewDaily new_daily(const SignalSeries& cumulative);

// --- distancing ----------------------------------------------------------

enum class Grade { A, B, C, D, F };

char to_char(Grade g);

/// `reduction` is a signed fraction; -0.70 means a 70% decrease. Bands are
/// lower-inclusive on the decrease.
Grade grade_distancing(double reduction);

struct DistancingGrade {
  std::string state;
  Date date;
  double reduction = 0.0;
  Grade grade = Grade::F;
};

/// CSV `state,date,reduction` -> one distancing_reduction series per state.
std::vector<SignalSeries> load_distancing(std::istream& in,
                                          const std::optional<std::string>& region = std::nullopt);

std::vector<DistancingGrade> grade_series(const SignalSeries& distancing);

// --- mobility ------------------------------------------------------------

inline constexpr std::array<std::string_view, 6> kMobilityCategories = {
    "retail_and_recreation", "grocery_and_pharmacy", "parks",
    "transit_stations",      "workplaces",           "residential",
};

/// Per-weekday median inside `window`; index 0 is Monday.
using WeekdayBaseline = std::array<double, 7>;

WeekdayBaseline compute_weekday_baseline(const SignalSeries& raw, DateRange window);

/// CSV `region,date,<six categories>`; the Google suffix
/// "_percent_change_from_baseline" on category headers is accepted.
std::vector<SignalSeries> load_mobility(std::istream& in,
                                        const std::optional<std::string>& region = std::nullopt);

// --- demographics --------------------------------------------------------

/// (state, indicator) -> percent in [0, 100].
struct DemographicTable {
  std::map<std::pair<std::string, std::string>, double> values;
  std::map<std::string, double> population;

  std::optional<double> get(std::string_view state, std::string_view indicator) const;
};

inline constexpr double kShareGroupTolerance = 0.5;

/// Long CSV `state,indicator,value,unit` with unit "count" or "percent".
/// Counts become percentages of the state's "population" row. Indicators
/// named "group:member" form a share group that must sum to 100 +- 0.5.
DemographicTable load_demographics(std::istream& in,
                                   const std::optional<std::string>& region = std::nullopt);

// --- trends --------------------------------------------------------------

/// round_half_up(100 * share / max share); an all-zero input maps to zeros.
std::vector<Point> normalize_interest(std::span<const Point> shares);

/// CSV `keyword,region,date,share` -> one trends_interest series per
/// (keyword, region) with category = keyword.
std::vector<SignalSeries> load_trends(std::istream& in,
                                      const std::optional<std::string>& region = std::nullopt);

}  // namespace pulse::signals
