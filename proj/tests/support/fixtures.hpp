#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::testing {

std::filesystem::path data_dir();
std::filesystem::path golden_dir();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);
std::string join_lines(const std::vector<std::string>& lines);

// ---- generated GKG corpora ----------------------------------------------

struct CorpusSpec {
  std::size_t records = 10000;
  double keyword_rate = 0.25;
  double theme_rate = 0.20;
  double malformed_rate = 0.03;
  double duplicate_rate = 0.10;  // share of lines re-using an earlier (publisher, title) with case/space noise
  std::uint64_t seed = 1;
};

/// Each well-formed line has a unique document identifier, so emitted sets can
/// be compared by identifier.
std::vector<std::string> generate_gkg_lines(const CorpusSpec& spec);

struct ReferenceResult {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t matched = 0;
  std::size_t duplicates = 0;
  std::set<std::string> emitted_ids;
};

/// Naive two-pass reference: pass one parses and filters every line, pass two
/// keeps the first line per normalized (publisher, title) string pair.
ReferenceResult reference_ingest(const std::vector<std::string>& lines);

/// Textbook single-formula Pearson in long double.
double reference_pearson(const std::vector<double>& x, const std::vector<double>& y);

// ---- fixture store ------------------------------------------------------

/// Planted label counts of the generated COVID and baseline corpora.
struct FixturePlan {
  std::map<std::string, std::size_t> covid;     // publisher -> articles
  std::map<std::string, std::size_t> baseline;  // publisher -> articles
};

/// Bias mix anchored to the published shares: Scientific 1.5% of the baseline
/// and 1.02% of the COVID corpus, Right at 1.15x its baseline share.
const FixturePlan& fixture_plan();

/// Writes generated corpora under `root`/inputs and builds a store at
/// `root`/store by running every ingest and analysis step.
std::filesystem::path build_fixture_store(const std::filesystem::path& root);

/// Every /v1 endpoint exercised by the golden tests, paired with a file name.
std::vector<std::pair<std::string, std::string>> golden_targets();

}  // namespace pulse::testing
