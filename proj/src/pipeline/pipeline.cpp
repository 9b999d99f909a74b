#include "pipeline/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "analytics/analytics.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "signals/signals.hpp"
#include "store/api.hpp"

namespace pulse::pipeline {

namespace {

using store::Granularity;

constexpr const char* kArticlesBlob = "articles";
constexpr const char* kBaselineBlob = "baseline";
constexpr const char* kRatingsBlob = "ratings";

const Date kUndated = Date::from_days(0);

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return in;
}

void put_counts(store::Transaction& tx, std::string_view m, std::string_view category,
                const analytics::CountSeries& series) {
  const auto g = series.granularity == analytics::Granularity::daily ? Granularity::daily : Granularity::weekly;
  for (const auto& p : series.points) {
    tx.put({std::string(m), std::string(category), g, p.period_start}, static_cast<double>(p.count));
  }
}

void put_series(store::Transaction& tx, std::string_view m, const std::string& category,
                const std::vector<signals::Point>& points) {
  for (const auto& p : points) tx.put({std::string(m), category, Granularity::daily, p.date}, p.value);
}

// ISO-week sums of a dated series.
std::vector<signals::Point> weekly_sums(const std::vector<signals::Point>& daily) {
  std::vector<signals::Point> out;
  for (const auto& p : daily) {
    const auto week = p.date.week_start();
    if (out.empty() || out.back().date != week) out.push_back({week, 0.0});
    out.back().value += p.value;
  }
  return out;
}

double nan_if_empty(std::optional<double> v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

analytics::Tally tally_corpus(const store::Snapshot& snap, const bias::Registry& registry) {
  analytics::Tally tally;
  for_each_article(snap, [&](const gkg::Article& a) { tally.add(a, registry); });
  return tally;
}

DateRange resolve_range(std::optional<Date> from, std::optional<Date> to, std::optional<DateRange> fallback) {
  if ((!from || !to) && !fallback) throw Error(Errc::empty_corpus, "no articles stored; run `ingest gkg` first");
  DateRange r{from ? *from : fallback->first, to ? *to : fallback->last};
  if (r.empty()) throw Error(Errc::invalid_argument, "date range is empty (from > to)");
  return r;
}

}  // namespace

// --- news ----------------------------------------------------------------

gkg::IngestReport ingest_gkg(store::Store& store, std::span<const std::filesystem::path> files,
                             const GkgIngestOptions& options) {
  std::vector<std::unique_ptr<gkg::RecordStream>> sources;
  for (const auto& f : files) sources.push_back(gkg::open_file_stream(f));

  gkg::IngestOptions opts;
  opts.layout = options.layout;
  opts.apply_filter = !options.baseline;
  opts.deduplicate = options.deduplicate;
  opts.jobs = options.jobs;

  auto tx = store.begin();
  gkg::IngestReport report;
  if (options.baseline) {
    std::unordered_map<std::string, std::uint64_t> per_publisher;
    report = gkg::ingest(sources, [&](const gkg::Article& a) { ++per_publisher[a.record.publisher]; }, opts);
    std::map<std::string, std::uint64_t> sorted(per_publisher.begin(), per_publisher.end());
    auto& blob = tx.blob(kBaselineBlob, "tsv");
    for (const auto& [pub, n] : sorted) blob.write_line(pub + "\t" + std::to_string(n));
  } else {
    auto& blob = tx.blob(kArticlesBlob, "tsv");
    analytics::Tally tally;
    report = gkg::ingest(
        sources,
        [&](const gkg::Article& a) {
          blob.write_line(gkg::format_gkg_line(a.record));
          tally.add(a.record.record_date, bias::BiasLabel::unrated);
        },
        opts);
    tx.replace_metric(std::string(metric::articles));
    if (auto cov = tally.coverage()) {
      const auto daily = tally.daily(*cov);
      put_counts(tx, metric::articles, kAllCategory, daily);
      put_counts(tx, metric::articles, kAllCategory, analytics::weekly_counts(daily));
    }
  }
  auto j = report.to_json();
  j["kind"] = options.baseline ? "gkg_baseline" : "gkg";
  tx.add_report(std::move(j));
  tx.commit();
  return report;
}

void for_each_article(const store::Snapshot& snap, const std::function<void(const gkg::Article&)>& fn) {
  auto path = snap.blob_path(kArticlesBlob);
  if (!path) return;
  auto stream = gkg::open_file_stream(*path);
  std::string line;
  gkg::Article article;
  while (stream->read_line(line)) {
    if (!gkg::try_parse_gkg_line(line, gkg::Layout::normalized, article.record)) {
      throw Error(Errc::corrupt_store, "stored article corpus has a malformed line");
    }
    article.matched = gkg::matches_covid_criteria(article.record);
    fn(article);
  }
}

std::vector<std::pair<std::string, std::uint64_t>> baseline_publishers(const store::Snapshot& snap) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  auto path = snap.blob_path(kBaselineBlob);
  if (!path) return out;
  std::ifstream in(*path);
  if (!in) throw Error(Errc::corrupt_store, "cannot read baseline corpus");
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error(Errc::corrupt_store, "bad baseline line");
    out.emplace_back(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
  }
  return out;
}

// --- bias ----------------------------------------------------------------

bias::Registry load_bias(store::Store& store, const std::filesystem::path& mbfc,
                         const std::filesystem::path& allsides) {
  auto registry = bias::Registry::load_files(mbfc, allsides);
  auto tx = store.begin();
  tx.blob(kRatingsBlob, "json").write(registry.to_json().dump(1) + "\n");
  std::size_t mbfc_n = 0, allsides_n = 0;
  for (const auto& [k, r] : registry.ratings()) {
    mbfc_n += r.mbfc.has_value();
    allsides_n += r.allsides.has_value();
  }
  tx.add_report({{"kind", "bias"}, {"publishers", registry.size()}, {"mbfc", mbfc_n}, {"allsides", allsides_n}});
  tx.commit();
  return registry;
}

bias::Registry stored_registry(const store::Snapshot& snap) {
  auto path = snap.blob_path(kRatingsBlob);
  if (!path) return {};
  std::ifstream in(*path);
  if (!in) throw Error(Errc::corrupt_store, "cannot read stored ratings");
  try {
    return bias::Registry::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::corrupt_store, std::string("stored ratings: ") + e.what());
  }
}

// --- signals -------------------------------------------------------------

std::optional<SignalFile> signal_file_from_string(std::string_view name) {
  if (name == "cases") return SignalFile::cases;
  if (name == "deaths") return SignalFile::deaths;
  if (name == "mobility") return SignalFile::mobility;
  if (name == "distancing") return SignalFile::distancing;
  if (name == "demographics") return SignalFile::demographics;
  if (name == "trends") return SignalFile::trends;
  return std::nullopt;
}

nlohmann::json SignalSummary::to_json() const {
  return {{"kind", kind}, {"series", series}, {"points", points}, {"clamps", clamps}, {"warnings", warnings.size()}};
}

SignalSummary ingest_signal(store::Store& store, SignalFile kind, const std::filesystem::path& file,
                            const std::optional<std::string>& region) {
  auto in = open_input(file);
  auto tx = store.begin();
  SignalSummary summary;

  switch (kind) {
    case SignalFile::cases:
    case SignalFile::deaths: {
      const bool cases = kind == SignalFile::cases;
      summary.kind = cases ? "cases" : "deaths";
      auto load = signals::load_case_series(
          in, cases ? signals::SignalKind::cases_cumulative : signals::SignalKind::deaths_cumulative, region);
      for (const auto& w : load.warnings) {
        summary.warnings.push_back(w.region + " " + w.date.iso() + ": cumulative value fell from " +
                                   text::format_double(w.previous) + " to " + text::format_double(w.value));
      }
      for (const auto& s : load.series) {
        const auto nd = signals::new_daily(s);
        summary.clamps += nd.clamps;
        put_series(tx, cases ? metric::cases_cumulative : metric::deaths_cumulative, s.region, s.points);
        const auto new_metric = cases ? metric::cases_new : metric::deaths_new;
        put_series(tx, new_metric, s.region, nd.series.points);
        for (const auto& p : weekly_sums(nd.series.points)) {
          tx.put({std::string(new_metric), s.region, Granularity::weekly, p.date}, p.value);
        }
        ++summary.series;
        summary.points += s.points.size();
      }
      break;
    }
    case SignalFile::mobility: {
      summary.kind = "mobility";
      for (const auto& s : signals::load_mobility(in, region)) {
        put_series(tx, metric::mobility_change, s.region + "/" + s.category, s.points);
        ++summary.series;
        summary.points += s.points.size();
      }
      break;
    }
    case SignalFile::distancing: {
      summary.kind = "distancing";
      for (const auto& s : signals::load_distancing(in, region)) {
        put_series(tx, metric::distancing_reduction, s.region, s.points);
        ++summary.series;
        summary.points += s.points.size();
      }
      break;
    }
    case SignalFile::demographics: {
      summary.kind = "demographics";
      const auto table = signals::load_demographics(in, region);
      std::map<std::string, bool> states;
      for (const auto& [key, pct] : table.values) {
        tx.put({std::string(metric::demographic), key.first + "/" + key.second, Granularity::total, kUndated}, pct);
        states[key.first] = true;
        ++summary.points;
      }
      summary.series = states.size();
      break;
    }
    case SignalFile::trends: {
      summary.kind = "trends";
      for (const auto& s : signals::load_trends(in, region)) {
        put_series(tx, metric::trends_interest, s.category + "/" + s.region, s.points);
        ++summary.series;
        summary.points += s.points.size();
      }
      break;
    }
  }
  tx.add_report(summary.to_json());
  tx.commit();
  return summary;
}

// --- keywords ------------------------------------------------------------

std::vector<keywords::KeywordCount> build_keywords(store::Store& store, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "--top must be at least 1");
  const auto snap = store.snapshot();
  keywords::KeywordCounter counter;
  for_each_article(*snap, [&](const gkg::Article& a) { counter.add_title(a.record.title); });
  const auto stored = counter.top(std::max(k, kStoredKeywords));

  auto tx = store.begin();
  tx.replace_metric(std::string(metric::keyword_mentions));
  for (const auto& kc : stored) {
    if (kc.lemma.size() > store::kCategoryBytes) continue;
    tx.put({std::string(metric::keyword_mentions), kc.lemma, Granularity::total, kUndated},
           static_cast<double>(kc.mentions));
  }
  tx.add_report({{"kind", "keywords"}, {"distinct", counter.distinct()}, {"tokens", counter.total_tokens()}});
  tx.commit();
  return counter.top(k);
}

// --- analytics -----------------------------------------------------------

std::optional<Analysis> analysis_from_string(std::string_view name) {
  if (name == "counts") return Analysis::counts;
  if (name == "bias") return Analysis::bias;
  if (name == "pearson") return Analysis::pearson;
  if (name == "shares") return Analysis::shares;
  if (name == "ratios") return Analysis::ratios;
  return std::nullopt;
}

AnalysisResult analyze(store::Store& store, Analysis what, std::optional<Date> from, std::optional<Date> to) {
  const auto snap = store.snapshot();
  const auto registry = stored_registry(*snap);
  const auto tally = tally_corpus(*snap, registry);
  AnalysisResult result;
  auto tx = store.begin();

  switch (what) {
    case Analysis::counts: {
      const auto range = resolve_range(from, to, tally.coverage());
      const auto daily = tally.daily(range);
      const auto weekly = analytics::weekly_counts(daily);
      tx.replace_metric(std::string(metric::articles));
      put_counts(tx, metric::articles, kAllCategory, daily);
      put_counts(tx, metric::articles, kAllCategory, weekly);
      for (const auto& p : daily.points) {
        result.rows.push_back({p.period_start, "articles_daily", static_cast<double>(p.count)});
      }
      for (const auto& p : weekly.points) {
        result.rows.push_back({p.period_start, "articles_weekly", static_cast<double>(p.count)});
      }
      for (const auto& p : snap->read_series(metric::cases_new, "US", Granularity::daily, range)) {
        result.rows.push_back({p.date, "cases_new", p.value});
      }
      break;
    }
    case Analysis::bias: {
      const auto range = resolve_range(from, to, tally.coverage());
      tx.replace_metric(std::string(metric::bias_count));
      for (const auto& [label, series] : analytics::counts_by_bias(tally, range)) {
        const auto name = std::string(bias::to_string(label));
        put_counts(tx, metric::bias_count, name, series);
        put_counts(tx, metric::bias_count, name, analytics::weekly_counts(series));
        if (label == bias::BiasLabel::unrated) continue;
        for (const auto& p : series.points) {
          result.rows.push_back({p.period_start, name, static_cast<double>(p.count)});
        }
      }
      break;
    }
    case Analysis::pearson: {
      DateRange range = kPearsonWindow;
      if (from) range.first = *from;
      if (to) range.last = *to;
      if (range.empty()) throw Error(Errc::invalid_argument, "date range is empty (from > to)");
      tx.replace_metric(std::string(metric::bias_pearson));
      for (const auto& [label, r] : analytics::bias_correlations(tally, range)) {
        const auto name = std::string(bias::to_string(label));
        tx.put({std::string(metric::bias_pearson), name, Granularity::total, kUndated}, nan_if_empty(r));
        result.rows.push_back({std::nullopt, name, r});
      }
      break;
    }
    case Analysis::shares:
    case Analysis::ratios: {
      std::optional<DateRange> range;
      if (from || to) range = resolve_range(from, to, tally.coverage());
      const auto covid = analytics::share_from_counts(tally.label_totals(range));
      tx.replace_metric(std::string(metric::bias_share));
      for (auto label : bias::kAllLabels) {
        tx.put({std::string(metric::bias_share), std::string(bias::to_string(label)), Granularity::total, kUndated},
               covid[label]);
      }

      const auto publishers = baseline_publishers(*snap);
      std::optional<analytics::ShareTable> baseline;
      if (!publishers.empty()) {
        std::array<std::uint64_t, bias::kLabelCount> counts{};
        for (const auto& [pub, n] : publishers) counts[bias::index_of(registry.resolve(pub))] += n;
        baseline = analytics::share_from_counts(counts);
        tx.replace_metric(std::string(metric::baseline_share));
        for (auto label : bias::kAllLabels) {
          tx.put({std::string(metric::baseline_share), std::string(bias::to_string(label)), Granularity::total,
                  kUndated},
                 (*baseline)[label]);
        }
      }

      if (what == Analysis::shares) {
        for (auto label : bias::kAllLabels) {
          result.rows.push_back({std::nullopt, std::string(bias::to_string(label)), covid[label]});
        }
        break;
      }
      if (!baseline) {
        throw Error(Errc::not_found, "no baseline corpus stored; run `ingest gkg --baseline` first");
      }
      const auto ratios = analytics::representation_ratio(covid, *baseline);
      tx.replace_metric(std::string(metric::bias_ratio));
      result.ratios = true;
      for (auto label : bias::kAllLabels) {
        const auto name = std::string(bias::to_string(label));
        tx.put({std::string(metric::bias_ratio), name, Granularity::total, kUndated}, nan_if_empty(ratios[label]));
        result.rows.push_back({std::nullopt, name, ratios[label]});
      }
      break;
    }
  }
  tx.add_report({{"kind", "analyze"}, {"rows", result.rows.size()}});
  tx.commit();
  return result;
}

AnalysisResult export_metric(const store::Snapshot& snap, std::string_view m,
                             std::optional<store::Granularity> granularity) {
  if (!snap.has_metric(m)) throw Error(Errc::not_found, "no stored metric '" + std::string(m) + "'");
  if (!granularity) {
    for (auto g : {Granularity::daily, Granularity::weekly, Granularity::total}) {
      if (!snap.categories(m, g).empty()) {
        granularity = g;
        break;
      }
    }
  }
  AnalysisResult result;
  result.ratios = m == metric::bias_ratio;
  for (const auto& category : snap.categories(m, *granularity)) {
    for (const auto& p : snap.read_series(m, category, *granularity)) {
      std::optional<double> v;
      if (!std::isnan(p.value)) v = p.value;
      std::optional<Date> d;
      if (*granularity != Granularity::total) d = p.date;
      result.rows.push_back({d, category, v});
    }
  }
  return result;
}

namespace {

std::optional<double> export_value(const AnalysisResult& r, const Row& row) {
  if (!row.value) return std::nullopt;
  if (r.ratios) return std::round(*row.value * 100.0) / 100.0;
  return row.value;
}

}  // namespace

std::string to_csv(const AnalysisResult& result) {
  std::ostringstream out;
  out << "date,label,value\n";
  for (const auto& row : result.rows) {
    out << (row.date ? row.date->iso() : "") << ',' << csv::escape(row.label) << ',';
    if (auto v = export_value(result, row)) out << text::format_double(*v);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const AnalysisResult& result) {
  auto arr = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json j;
    j["date"] = row.date ? nlohmann::json(row.date->iso()) : nlohmann::json();
    j["label"] = row.label;
    auto v = export_value(result, row);
    j["value"] = v ? api::number(*v) : nlohmann::json();
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace pulse::pipeline
