#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "gkg/record.hpp"

namespace pulse::gkg {

/// A line-oriented input. Implementations keep a bounded buffer so memory
/// does not grow with input size.
class RecordStream {
 public:
  virtual ~RecordStream() = default;

  /// Reads the next line without its terminator. Returns false at end of
  /// input; throws Error{Errc::source_unreadable} on I/O failure.
  virtual bool read_line(std::string& line) = 0;
  virtual std::string name() const = 0;
};

/// Plain or gzip file, chosen by the first two bytes (1f 8b). Opening is
/// deferred to the first read so an unreadable path surfaces inside ingest.
std::unique_ptr<RecordStream> open_file_stream(std::filesystem::path path);

/// In-memory text, mainly for tests and the C API.
std::unique_ptr<RecordStream> make_memory_stream(std::string text, std::string name = "<memory>");

struct SourceFailure {
  std::string source;
  std::string message;
};

struct IngestReport {
  std::uint64_t lines_read = 0;
  std::uint64_t malformed = 0;
  std::uint64_t criteria_matched = 0;
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t emitted = 0;
  std::vector<SourceFailure> failed_sources;

  IngestReport& operator+=(const IngestReport& other);
  bool reconciles() const {
    return emitted == criteria_matched - duplicates_dropped &&
           lines_read >= malformed + criteria_matched;
  }
  nlohmann::json to_json() const;
};

struct IngestOptions {
  Layout layout = Layout::normalized;
  // When false every well-formed record counts as matched (baseline corpora).
  bool apply_filter = true;
  bool deduplicate = true;
  // Worker threads; sources are distributed across them.
  unsigned jobs = 1;
};

/// Thread-safe set of fingerprints with first-insert-wins semantics.
class DedupIndex {
 public:
  /// True if the key was not present before.
  bool insert(const DedupKey& key);
  std::size_t size() const;

 private:
  static constexpr std::size_t kShards = 16;
  struct Shard {
    mutable std::mutex mu;
    std::unordered_set<DedupKey, DedupKeyHash> keys;
  };
  std::array<Shard, kShards> shards_;
};

using ArticleSink = std::function<void(const Article&)>;

/// Single pass over each source. The sink is never invoked concurrently.
IngestReport ingest(std::span<const std::unique_ptr<RecordStream>> sources, const ArticleSink& sink,
                    const IngestOptions& options = {});

}  // namespace pulse::gkg
