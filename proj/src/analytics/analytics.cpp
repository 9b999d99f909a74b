#include "analytics/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace pulse::analytics {

using bias::BiasLabel;
using bias::index_of;

std::uint64_t CountSeries::total() const {
  std::uint64_t t = 0;
  for (const auto& p : points) t += p.count;
  return t;
}

std::vector<double> CountSeries::values() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(static_cast<double>(p.count));
  return v;
}

void Tally::add(Date date, BiasLabel label) {
  ++by_day_[date][index_of(label)];
  ++total_;
}

void Tally::add(const gkg::Article& article, const bias::Registry& registry) {
  add(article.record.record_date, registry.resolve(article.record.publisher));
}

CountSeries Tally::daily(DateRange range, std::string label) const {
  CountSeries out{Granularity::daily, std::move(label), {}};
  out.points.reserve(static_cast<std::size_t>(range.length()));
  auto it = by_day_.lower_bound(range.first);
  for (Date d = range.first; d <= range.last; ++d) {
    std::uint64_t n = 0;
    if (it != by_day_.end() && it->first == d) {
      for (auto c : it->second) n += c;
      ++it;
    }
    out.points.push_back({d, n, false});
  }
  return out;
}

CountSeries Tally::daily(DateRange range, BiasLabel label) const {
  CountSeries out{Granularity::daily, std::string(bias::to_string(label)), {}};
  out.points.reserve(static_cast<std::size_t>(range.length()));
  auto it = by_day_.lower_bound(range.first);
  for (Date d = range.first; d <= range.last; ++d) {
    std::uint64_t n = 0;
    if (it != by_day_.end() && it->first == d) {
      n = it->second[index_of(label)];
      ++it;
    }
    out.points.push_back({d, n, false});
  }
  return out;
}

std::array<std::uint64_t, bias::kLabelCount> Tally::label_totals(std::optional<DateRange> range) const {
  std::array<std::uint64_t, bias::kLabelCount> out{};
  for (const auto& [d, counts] : by_day_) {
    if (range && !range->contains(d)) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += counts[i];
  }
  return out;
}

std::optional<DateRange> Tally::coverage() const {
  if (by_day_.empty()) return std::nullopt;
  return DateRange{by_day_.begin()->first, by_day_.rbegin()->first};
}

CountSeries daily_counts(std::span<const gkg::Article> articles, DateRange range) {
  if (range.empty()) throw Error(Errc::invalid_argument, "daily_counts needs a non-empty range");
  Tally tally;
  for (const auto& a : articles) tally.add(a.record.record_date, BiasLabel::unrated);
  return tally.daily(range);
}

CountSeries weekly_counts(const CountSeries& daily) {
  if (daily.granularity != Granularity::daily) {
    throw Error(Errc::wrong_granularity, "weekly_counts needs a daily series");
  }
  CountSeries out{Granularity::weekly, daily.label, {}};
  int days_in_week = 0;
  for (const auto& p : daily.points) {
    const Date week = p.period_start.week_start();
    if (out.points.empty() || out.points.back().period_start != week) {
      if (!out.points.empty()) out.points.back().partial = days_in_week < 7;
      out.points.push_back({week, 0, false});
      days_in_week = 0;
    }
    out.points.back().count += p.count;
    ++days_in_week;
  }
  if (!out.points.empty()) out.points.back().partial = days_in_week < 7;
  return out;
}

std::map<BiasLabel, CountSeries> counts_by_bias(const Tally& tally, DateRange range) {
  std::map<BiasLabel, CountSeries> out;
  for (auto label : bias::kAllLabels) out.emplace(label, tally.daily(range, label));
  return out;
}

std::map<BiasLabel, CountSeries> counts_by_bias(std::span<const gkg::Article> articles,
                                                const bias::Registry& registry, DateRange range) {
  if (range.empty()) throw Error(Errc::invalid_argument, "counts_by_bias needs a non-empty range");
  Tally tally;
  for (const auto& a : articles) tally.add(a, registry);
  return counts_by_bias(tally, range);
}

std::vector<double> normalize_series(const CountSeries& series) {
  const auto total = series.total();
  if (total == 0) throw Error(Errc::zero_total, "cannot normalize a series with zero total");
  std::vector<double> out;
  out.reserve(series.points.size());
  const auto denom = static_cast<double>(total);
  for (const auto& p : series.points) out.push_back(static_cast<double>(p.count) / denom);
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::length_mismatch, "pearson inputs differ in length (" + std::to_string(x.size()) +
                                           " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw Error(Errc::length_mismatch, "pearson needs at least two points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) throw Error(Errc::zero_variance, "pearson input has zero variance");

  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

ShareTable share_from_counts(const std::array<std::uint64_t, bias::kLabelCount>& counts) {
  ShareTable t;
  for (auto c : counts) t.total += c;
  if (t.total == 0) throw Error(Errc::empty_corpus, "cannot compute shares of an empty corpus");
  const auto denom = static_cast<double>(t.total);
  for (std::size_t i = 0; i < counts.size(); ++i) t.shares[i] = static_cast<double>(counts[i]) / denom;
  return t;
}

ShareTable category_share(std::span<const gkg::Article> articles, const bias::Registry& registry) {
  std::array<std::uint64_t, bias::kLabelCount> counts{};
  for (const auto& a : articles) ++counts[index_of(registry.resolve(a.record.publisher))];
  return share_from_counts(counts);
}

RatioTable representation_ratio(const ShareTable& covid, const ShareTable& baseline) {
  RatioTable out;
  for (std::size_t i = 0; i < bias::kLabelCount; ++i) {
    if (baseline.shares[i] > 0) out.ratios[i] = covid.shares[i] / baseline.shares[i];
  }
  return out;
}

std::map<BiasLabel, std::optional<double>> bias_correlations(const Tally& tally, DateRange range) {
  const auto total = normalize_series(tally.daily(range));
  std::map<BiasLabel, std::optional<double>> out;
  for (auto label : bias::kAllLabels) {
    if (label == BiasLabel::unrated) continue;
    const auto series = tally.daily(range, label).values();
    try {
      out[label] = pearson(series, total);
    } catch (const Error& e) {
      if (e.code() != Errc::zero_variance) throw;
      out[label] = std::nullopt;
    }
  }
  return out;
}

}  // namespace pulse::analytics
