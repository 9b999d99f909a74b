#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/date.hpp"

namespace pulse::store {

// On-disk layout
//
//   <dir>/manifest.json        current version; replaced atomically by rename
//   <dir>/seg-<version>.dat    immutable segment of fixed-width records
//   <dir>/blob-<name>-<v>.<x>  immutable named documents (articles, ratings)
//   <dir>/LOCK                 writer lock (flock)
//
// A segment starts with a 16-byte header ("PLSSEG01", u32 record count,
// u32 CRC-32 of the record bytes) followed by 128-byte little-endian records:
//
//   char metric[32] | char category[80] | u8 granularity | u8 pad[3] |
//   i32 days since 1970-01-01 | f64 value
//
// Later segments override earlier ones key by key. A segment may also list
// metrics it replaces wholesale; earlier records of those metrics are dropped.

enum class Granularity : std::uint8_t { daily = 0, weekly = 1, total = 2 };

std::string_view to_string(Granularity g);
std::optional<Granularity> granularity_from_string(std::string_view s);

inline constexpr std::size_t kMetricBytes = 32;
inline constexpr std::size_t kCategoryBytes = 80;
inline constexpr std::size_t kRecordBytes = 128;
inline constexpr std::size_t kSegmentHeaderBytes = 16;

struct AggregateKey {
  std::string metric;
  std::string category;
  Granularity granularity = Granularity::daily;
  Date date;

  auto operator<=>(const AggregateKey&) const = default;
  bool operator==(const AggregateKey&) const = default;
};

struct Aggregate {
  AggregateKey key;
  double value = 0.0;
};

struct SeriesPoint {
  Date date;
  double value = 0.0;
};

struct SegmentEntry {
  std::string file;
  std::vector<std::string> replaces;
};

struct Manifest {
  std::uint64_t version = 0;
  std::vector<SegmentEntry> segments;
  std::map<std::string, std::string> blobs;
  nlohmann::json reports = nlohmann::json::array();
  std::map<std::string, DateRange> coverage;  // per metric, daily points only

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

/// Immutable, fully loaded view of one store version.
class Snapshot {
 public:
  static std::shared_ptr<const Snapshot> load(const std::filesystem::path& dir);

  std::uint64_t version() const { return manifest_.version; }
  const Manifest& manifest() const { return manifest_; }

  /// Points sorted by date; empty for unknown prefixes.
  std::vector<SeriesPoint> read_series(std::string_view metric, std::string_view category,
                                       Granularity granularity,
                                       std::optional<DateRange> range = std::nullopt) const;
  std::optional<double> value(const AggregateKey& key) const;
  /// Distinct categories stored for `metric` at `granularity`, sorted.
  std::vector<std::string> categories(std::string_view metric, Granularity granularity) const;
  bool has_series(std::string_view metric, std::string_view category, Granularity granularity) const;
  bool has_metric(std::string_view metric) const;

  std::optional<std::filesystem::path> blob_path(std::string_view name) const;

  const std::map<AggregateKey, double>& data() const { return data_; }

 private:
  std::filesystem::path dir_;
  Manifest manifest_;
  std::map<AggregateKey, double> data_;
};

/// Test hook: where to stop a commit as if the process died.
enum class CrashPoint {
  none,
  after_segment,        // segment and blobs durable, manifest untouched
  after_manifest_temp,  // new manifest written to a temp file, not renamed
};

struct CommitOptions {
  CrashPoint crash = CrashPoint::none;
};

class Store;

/// Streams bytes into a not-yet-visible blob file.
class BlobWriter {
 public:
  BlobWriter(const BlobWriter&) = delete;
  BlobWriter& operator=(const BlobWriter&) = delete;
  ~BlobWriter();

  void write(std::string_view bytes);
  void write_line(std::string_view line);

 private:
  friend class Transaction;
  BlobWriter(std::filesystem::path tmp, std::string extension);
  void finish();

  std::filesystem::path tmp_;
  std::string extension_;
  std::FILE* file_ = nullptr;
};

/// One atomic write batch. Nothing becomes visible until commit() returns.
class Transaction {
 public:
  Transaction(Transaction&&) noexcept;
  Transaction& operator=(Transaction&&) = delete;
  ~Transaction();

  void put(AggregateKey key, double value);
  void put(const Aggregate& a) { put(a.key, a.value); }
  /// Drops every earlier record of `metric` when this batch commits.
  void replace_metric(std::string metric);
  BlobWriter& blob(const std::string& name, const std::string& extension);
  void add_report(nlohmann::json report);

  std::size_t size() const { return batch_.size(); }

  /// Returns the new version. Throws Error{duplicate_key_in_batch},
  /// Error{key_too_long}, Error{storage_full}, or Error{simulated_crash}.
  std::uint64_t commit(const CommitOptions& options = {});

 private:
  friend class Store;
  explicit Transaction(std::filesystem::path dir);
  void discard() noexcept;

  std::filesystem::path dir_;
  std::vector<Aggregate> batch_;
  std::vector<std::string> replaces_;
  std::map<std::string, std::unique_ptr<BlobWriter>> blobs_;
  nlohmann::json reports_ = nlohmann::json::array();
  bool done_ = false;
};

class Store {
 public:
  /// Opens `dir`; with `create` an empty store (version 0) is initialized if
  /// no manifest exists. Throws Error{corrupt_store} or Error{not_found}.
  static Store open(const std::filesystem::path& dir, bool create = false);

  const std::filesystem::path& dir() const { return dir_; }
  std::uint64_t current_version() const;
  std::shared_ptr<const Snapshot> snapshot() const;
  Transaction begin() const;

  std::uint64_t write_aggregates(std::span<const Aggregate> batch, const CommitOptions& options = {});

 private:
  explicit Store(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::filesystem::path dir_;
};

/// Throws Error{key_too_long} or Error{invalid_argument}.
void validate_key(const AggregateKey& key);

}  // namespace pulse::store
