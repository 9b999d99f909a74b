#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bias/registry.hpp"
#include "common/date.hpp"
#include "gkg/ingest.hpp"
#include "keywords/keywords.hpp"
#include "store/store.hpp"

namespace pulse::pipeline {

// Metric names used in the aggregate store.
namespace metric {
inline constexpr std::string_view articles = "articles";
inline constexpr std::string_view bias_count = "bias_count";
inline constexpr std::string_view bias_share = "bias_share";
inline constexpr std::string_view baseline_share = "baseline_share";
inline constexpr std::string_view bias_ratio = "bias_ratio";
inline constexpr std::string_view bias_pearson = "bias_pearson";
inline constexpr std::string_view cases_cumulative = "cases_cumulative";
inline constexpr std::string_view cases_new = "cases_new";
inline constexpr std::string_view deaths_cumulative = "deaths_cumulative";
inline constexpr std::string_view deaths_new = "deaths_new";
inline constexpr std::string_view mobility_change = "mobility_change";
inline constexpr std::string_view distancing_reduction = "distancing_reduction";
inline constexpr std::string_view trends_interest = "trends_interest";
inline constexpr std::string_view demographic = "demographic";
inline constexpr std::string_view keyword_mentions = "keyword_mentions";
}  // namespace metric

inline constexpr std::string_view kAllCategory = "all";
inline constexpr std::size_t kStoredKeywords = 1000;

/// Default Pearson window (Jan 1 through May 31, 2020).
inline constexpr DateRange kPearsonWindow{Date::from_ymd(2020, 1, 1), Date::from_ymd(2020, 5, 31)};

// --- news ----------------------------------------------------------------

struct GkgIngestOptions {
  gkg::Layout layout = gkg::Layout::normalized;
  bool baseline = false;  // unfiltered corpus, stored as per-publisher counts
  bool deduplicate = true;
  unsigned jobs = 1;
};

/// Replaces the stored COVID corpus (or the baseline corpus) and its daily and
/// weekly article counts in one commit.
gkg::IngestReport ingest_gkg(store::Store& store, std::span<const std::filesystem::path> files,
                             const GkgIngestOptions& options);

/// Streams the stored COVID corpus. No-op when none is stored.
void for_each_article(const store::Snapshot& snap, const std::function<void(const gkg::Article&)>& fn);

/// Per-publisher counts of the stored baseline corpus.
std::vector<std::pair<std::string, std::uint64_t>> baseline_publishers(const store::Snapshot& snap);

// --- bias ----------------------------------------------------------------

bias::Registry load_bias(store::Store& store, const std::filesystem::path& mbfc,
                         const std::filesystem::path& allsides);
/// Empty registry when none is stored.
bias::Registry stored_registry(const store::Snapshot& snap);

// --- signals -------------------------------------------------------------

enum class SignalFile { cases, deaths, mobility, distancing, demographics, trends };

std::optional<SignalFile> signal_file_from_string(std::string_view name);

struct SignalSummary {
  std::string kind;
  std::size_t series = 0;
  std::size_t points = 0;
  std::size_t clamps = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

SignalSummary ingest_signal(store::Store& store, SignalFile kind, const std::filesystem::path& file,
                            const std::optional<std::string>& region = std::nullopt);

// --- keywords ------------------------------------------------------------

/// Counts lemmas over the stored corpus, stores the top max(k, 1000), and
/// returns the top k.
std::vector<keywords::KeywordCount> build_keywords(store::Store& store, std::size_t k);

// --- analytics -----------------------------------------------------------

enum class Analysis { counts, bias, pearson, shares, ratios };

std::optional<Analysis> analysis_from_string(std::string_view name);

/// One plot-ready long-format row. `date` is empty for undated metrics and
/// `value` is empty where a metric is undefined.
struct Row {
  std::optional<Date> date;
  std::string label;
  std::optional<double> value;
};

struct AnalysisResult {
  std::vector<Row> rows;
  bool ratios = false;  // round values to two decimals on export
};

AnalysisResult analyze(store::Store& store, Analysis what, std::optional<Date> from = std::nullopt,
                       std::optional<Date> to = std::nullopt);

/// All stored points of `metric`. Without a granularity the finest available
/// one is used (daily, then weekly, then total).
AnalysisResult export_metric(const store::Snapshot& snap, std::string_view metric,
                             std::optional<store::Granularity> granularity = std::nullopt);

std::string to_csv(const AnalysisResult& result);
std::string to_json(const AnalysisResult& result);

}  // namespace pulse::pipeline
