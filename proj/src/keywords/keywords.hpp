#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gkg/record.hpp"

namespace pulse::keywords {

struct KeywordCount {
  std::string lemma;
  std::uint64_t mentions = 0;

  bool operator==(const KeywordCount&) const = default;
};

/// Lowercased tokens split on whitespace and punctuation. Hyphens survive
/// between two word characters; apostrophes are deleted so "trump's" stays one
/// token. Bytes >= 0x80 are treated as word characters.
std::vector<std::string> tokenize_title(std::string_view title);

/// Rule-based English lemma. Tokens with digits or hyphens pass through.
std::string lemmatize(std::string_view token);

bool is_stop_token(std::string_view lemma);

/// Occurrence counter; shards merge by addition.
class KeywordCounter {
 public:
  void add_title(std::string_view title);
  void merge(const KeywordCounter& other);

  /// Top `k` by count, ties broken by ascending lemma.
  std::vector<KeywordCount> top(std::size_t k) const;

  std::uint64_t total_tokens() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

std::vector<KeywordCount> top_keywords(std::span<const gkg::Article> articles, std::size_t k);

}  // namespace pulse::keywords
