#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "common/date.hpp"

namespace pulse::gkg {

/// One news record in the normalized six-column layout.
struct GkgRecord {
  Date record_date;
  std::string publisher;
  std::string document_identifier;
  std::string title;
  std::vector<std::string> themes;
  double tone = 0.0;

  bool operator==(const GkgRecord&) const = default;
};

enum class Criterion : std::uint8_t {
  title_url_keyword = 1u << 0,
  theme_match = 1u << 1,
};

/// Which inclusion criteria fired for a record.
class CriteriaSet {
 public:
  constexpr CriteriaSet() = default;

  constexpr void insert(Criterion c) { bits_ |= static_cast<std::uint8_t>(c); }
  constexpr bool contains(Criterion c) const { return (bits_ & static_cast<std::uint8_t>(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr bool operator==(const CriteriaSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Article {
  GkgRecord record;
  CriteriaSet matched;

  bool covid_related() const { return !matched.empty(); }
  bool operator==(const Article&) const = default;
};

/// Column layout of an input line.
enum class Layout {
  normalized,  // date, publisher, document identifier, title, themes, tone
  raw_gkg,     // GKG 2.1, 27 columns, title inside the extras XML
};

inline constexpr std::size_t kNormalizedColumns = 6;
inline constexpr std::size_t kRawGkgColumns = 27;

/// Lowercase keywords matched as substrings of the title or URL.
inline constexpr std::array<std::string_view, 6> kCovidKeywords = {
    "coronavirus", "covid", "2019-ncov", "ncov-2019", "ncov2019", "sars-cov-2",
};

/// Theme codes matched as exact tokens.
inline constexpr std::array<std::string_view, 5> kCovidThemes = {
    "WB_2167_PANDEMICS",
    "HEALTH_PANDEMIC",
    "TAX_DISEASE_CORONAVIRUS",
    "TAX_DISEASE_CORONAVIRUSES",
    "TAX_DISEASE_CORONAVIRUS_INFECTIONS",
};

/// Parses one line into `out`, reusing its buffers. Returns false (and sets
/// `reason` when given) for a malformed line. A trailing '\n' or "\r\n" is
/// ignored.
bool try_parse_gkg_line(std::string_view line, Layout layout, GkgRecord& out,
                        std::string* reason = nullptr);

/// Throwing variant; raises Error{Errc::malformed_record}.
GkgRecord parse_gkg_line(std::string_view line, Layout layout = Layout::normalized);

/// Serializes to the normalized layout (no line terminator).
std::string format_gkg_line(const GkgRecord& record);

CriteriaSet matches_covid_criteria(const GkgRecord& record);

/// 128-bit fingerprint of the normalized (publisher, title) pair.
struct DedupKey {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  bool operator==(const DedupKey&) const = default;
  auto operator<=>(const DedupKey&) const = default;
};

struct DedupKeyHash {
  std::size_t operator()(const DedupKey& k) const noexcept {
    return static_cast<std::size_t>(k.lo ^ (k.hi * 0x9E3779B97F4A7C15ull));
  }
};

/// Lowercased, trimmed publisher.
std::string normalize_dedup_publisher(std::string_view publisher);
/// Lowercased title with whitespace runs collapsed to one space and trimmed.
std::string normalize_dedup_title(std::string_view title);

DedupKey dedup_key(std::string_view publisher, std::string_view title);
inline DedupKey dedup_key(const GkgRecord& r) { return dedup_key(r.publisher, r.title); }

std::string to_hex(const DedupKey& key);

}  // namespace pulse::gkg
