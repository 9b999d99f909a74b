#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace pulse::bias {

enum class BiasLabel : std::uint8_t {
  left,
  left_center,
  least_biased,
  right_center,
  right,
  scientific,
  questionable_sources,
  conspiracy_pseudoscience,
  mixed,
  unrated,
};

inline constexpr std::size_t kLabelCount = 10;

inline constexpr std::array<BiasLabel, kLabelCount> kAllLabels = {
    BiasLabel::left,
    BiasLabel::left_center,
    BiasLabel::least_biased,
    BiasLabel::right_center,
    BiasLabel::right,
    BiasLabel::scientific,
    BiasLabel::questionable_sources,
    BiasLabel::conspiracy_pseudoscience,
    BiasLabel::mixed,
    BiasLabel::unrated,
};

constexpr std::size_t index_of(BiasLabel label) { return static_cast<std::size_t>(label); }

/// Display name, e.g. "Left-center", "Questionable Sources".
std::string_view to_string(BiasLabel label);
/// Inverse of to_string, case-insensitive; accepts "Unrated".
std::optional<BiasLabel> label_from_string(std::string_view name);

enum class Rater { mbfc, allsides };

/// True if `rater` can assign `label`.
bool rater_can_assign(Rater rater, BiasLabel label);

struct SourceRating {
  std::string publisher;
  std::optional<BiasLabel> mbfc;
  std::optional<BiasLabel> allsides;

  bool operator==(const SourceRating&) const = default;
};

/// Lowercase, trimmed, leading "www." removed.
std::string normalize_publisher(std::string_view publisher);

/// Immutable after loading; safe for concurrent reads.
class Registry {
 public:
  Registry() = default;

  /// Reads `publisher,label` CSV tables. Either stream may be null.
  static Registry load(std::istream* mbfc, std::istream* allsides);
  /// Empty paths are skipped.
  static Registry load_files(const std::filesystem::path& mbfc, const std::filesystem::path& allsides);

  /// Adds one rating; throws on vocabulary violations or a repeated publisher
  /// for the same rater.
  void add(Rater rater, std::string_view publisher, BiasLabel label);

  const SourceRating* find(std::string_view publisher) const;
  BiasLabel resolve(std::string_view publisher) const;

  std::size_t size() const { return ratings_.size(); }
  const std::map<std::string, SourceRating, std::less<>>& ratings() const { return ratings_; }

  nlohmann::json to_json() const;
  static Registry from_json(const nlohmann::json& j);

 private:
  void load_table(std::istream& in, Rater rater);

  std::map<std::string, SourceRating, std::less<>> ratings_;
};

/// MBFC label if present, else AllSides, else Unrated.
inline BiasLabel resolve_bias(const Registry& registry, std::string_view publisher) {
  return registry.resolve(publisher);
}

}  // namespace pulse::bias
