#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bias/registry.hpp"
#include "common/date.hpp"
#include "gkg/record.hpp"

namespace pulse::analytics {

enum class Granularity { daily, weekly };

struct CountPoint {
  Date period_start;
  std::uint64_t count = 0;
  bool partial = false;  // weekly only: the week is not fully covered by the input

  bool operator==(const CountPoint&) const = default;
};

struct CountSeries {
  Granularity granularity = Granularity::daily;
  std::string label;
  std::vector<CountPoint> points;

  std::uint64_t total() const;
  std::vector<double> values() const;
};

/// Share of each label in a corpus; unrated included. Shares sum to 1.
struct ShareTable {
  std::array<double, bias::kLabelCount> shares{};
  std::uint64_t total = 0;

  double operator[](bias::BiasLabel l) const { return shares[bias::index_of(l)]; }
};

/// covid_share / baseline_share; nullopt where the baseline share is zero.
struct RatioTable {
  std::array<std::optional<double>, bias::kLabelCount> ratios{};

  std::optional<double> operator[](bias::BiasLabel l) const { return ratios[bias::index_of(l)]; }
};

/// Per-day, per-label tallies. Everything below can be derived from it, so
/// callers that stream articles only need to feed (date, label) pairs.
class Tally {
 public:
  void add(Date date, bias::BiasLabel label);
  void add(const gkg::Article& article, const bias::Registry& registry);

  /// Zero-filled per-day totals over `range`.
  CountSeries daily(DateRange range, std::string label = "articles") const;
  CountSeries daily(DateRange range, bias::BiasLabel label) const;
  std::array<std::uint64_t, bias::kLabelCount> label_totals(std::optional<DateRange> range = {}) const;
  std::optional<DateRange> coverage() const;
  std::uint64_t total() const { return total_; }

 private:
  std::map<Date, std::array<std::uint64_t, bias::kLabelCount>> by_day_;
  std::uint64_t total_ = 0;
};

CountSeries daily_counts(std::span<const gkg::Article> articles, DateRange range);

/// ISO-week (Monday) sums. Throws Error{wrong_granularity} on weekly input.
CountSeries weekly_counts(const CountSeries& daily);

/// Every label, including unrated, over `range`.
std::map<bias::BiasLabel, CountSeries> counts_by_bias(std::span<const gkg::Article> articles,
                                                     const bias::Registry& registry, DateRange range);
std::map<bias::BiasLabel, CountSeries> counts_by_bias(const Tally& tally, DateRange range);

/// Each point divided by the series total. Throws Error{zero_total}.
std::vector<double> normalize_series(const CountSeries& series);

/// Product-moment correlation. Throws Error{length_mismatch} or
/// Error{zero_variance}.
double pearson(std::span<const double> x, std::span<const double> y);

/// Throws Error{empty_corpus} when there are no articles.
ShareTable category_share(std::span<const gkg::Article> articles, const bias::Registry& registry);
ShareTable share_from_counts(const std::array<std::uint64_t, bias::kLabelCount>& counts);

RatioTable representation_ratio(const ShareTable& covid, const ShareTable& baseline);

/// Pearson of each label's daily counts against the normalized all-source
/// distribution over `range`. Labels with no variance map to nullopt.
std::map<bias::BiasLabel, std::optional<double>> bias_correlations(const Tally& tally, DateRange range);

}  // namespace pulse::analytics
