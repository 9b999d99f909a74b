#include "keywords/keywords.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "common/error.hpp"
#include "common/text.hpp"

namespace pulse::keywords {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' counts as a vowel after a consonant (Porter convention).
bool is_consonant(std::string_view w, std::size_t i) {
  const char c = w[i];
  if (is_vowel(c)) return false;
  if (c == 'y') return i == 0 || !is_consonant(w, i - 1);
  return true;
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_consonant(w, i)) return true;
  }
  return false;
}

// Number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = !is_consonant(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) && last != 'w' &&
         last != 'x' && last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

// Repairs a stem after removing "-ing" / "-ed".
std::string restore_stem(std::string_view stem) {
  std::string s(stem);
  if (ends_with(s, "at") || ends_with(s, "bl") || ends_with(s, "iz")) return s + "e";
  const auto n = s.size();
  if (n >= 2 && s[n - 1] == s[n - 2] && is_consonant(s, n - 1) && s[n - 1] != 'l' && s[n - 1] != 's' &&
      s[n - 1] != 'z') {
    s.pop_back();
    return s;
  }
  if (measure(s) == 1 && ends_cvc(s)) return s + "e";
  return s;
}

const std::unordered_map<std::string_view, std::string_view>& irregulars() {
  static const std::unordered_map<std::string_view, std::string_view> kTable = {
      {"says", "say"},         {"said", "say"},           {"cases", "case"},
      {"news", "news"},        {"dies", "die"},           {"died", "die"},
      {"dying", "die"},        {"children", "child"},     {"women", "woman"},
      {"men", "man"},          {"does", "do"},            {"goes", "go"},
      {"went", "go"},          {"houses", "house"},       {"causes", "cause"},
      {"caused", "cause"},     {"uses", "use"},           {"used", "use"},
      {"abuses", "abuse"},     {"during", "during"},      {"morning", "morning"},
      {"evening", "evening"},  {"nothing", "nothing"},    {"something", "something"},
      {"anything", "anything"}, {"everything", "everything"}, {"hundred", "hundred"},
      {"united", "united"},    {"this", "this"},          {"thus", "thus"},
      {"always", "always"},    {"perhaps", "perhaps"},    {"series", "series"},
      {"species", "species"},  {"sars", "sars"},          {"lives", "life"},
  };
  return kTable;
}

}  // namespace

std::vector<std::string> tokenize_title(std::string_view title) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  const auto n = title.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(title[i]);
    if (c == '\'') continue;
    if (c == 0xE2 && i + 2 < n && static_cast<unsigned char>(title[i + 1]) == 0x80) {
      // U+2000..U+203F general punctuation; curly single quotes are apostrophes.
      const auto third = static_cast<unsigned char>(title[i + 2]);
      i += 2;
      if (third == 0x98 || third == 0x99) continue;
      flush();
      continue;
    }
    if (c == 0xC2 && i + 1 < n && static_cast<unsigned char>(title[i + 1]) == 0xA0) {
      ++i;
      flush();
      continue;
    }
    if (c == '-') {
      const bool next_word = i + 1 < n && is_word_byte(static_cast<unsigned char>(title[i + 1]));
      if (!cur.empty() && is_word_byte(static_cast<unsigned char>(cur.back())) && next_word) {
        cur.push_back('-');
      } else {
        flush();
      }
      continue;
    }
    if (is_word_byte(c)) {
      cur.push_back(text::lower_ascii(static_cast<char>(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string lemmatize(std::string_view token) {
  for (char c : token) {
    if ((c >= '0' && c <= '9') || c == '-') return std::string(token);
  }
  const auto& table = irregulars();
  if (auto it = table.find(token); it != table.end()) return std::string(it->second);

  const std::string_view w = token;
  const auto n = w.size();
  if (n <= 3) return std::string(w);

  if (ends_with(w, "ies") && n > 4) return std::string(w.substr(0, n - 3)) + "y";
  if (ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "zes") || ends_with(w, "ches") ||
      ends_with(w, "shes") || ends_with(w, "uses")) {
    return std::string(w.substr(0, n - 2));
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return std::string(w);
  if (ends_with(w, "s")) return std::string(w.substr(0, n - 1));

  if (ends_with(w, "ing") && n >= 5) {
    const auto stem = w.substr(0, n - 3);
    if (has_vowel(stem)) return restore_stem(stem);
    return std::string(w);
  }
  if (ends_with(w, "ied") && n > 4) return std::string(w.substr(0, n - 3)) + "y";
  if (ends_with(w, "eed")) return std::string(w);
  if (ends_with(w, "ed")) {
    const auto stem = w.substr(0, n - 2);
    if (has_vowel(stem)) return restore_stem(stem);
  }
  return std::string(w);
}

bool is_stop_token(std::string_view lemma) {
  static constexpr std::array<std::string_view, 10> kStop = {"a",  "an",  "the", "of", "to",
                                                             "in", "for", "on",  "and", "at"};
  return std::find(kStop.begin(), kStop.end(), lemma) != kStop.end();
}

void KeywordCounter::add_title(std::string_view title) {
  for (const auto& tok : tokenize_title(title)) {
    auto lemma = lemmatize(tok);
    if (lemma.empty() || is_stop_token(lemma)) continue;
    ++counts_[std::move(lemma)];
    ++total_;
  }
}

void KeywordCounter::merge(const KeywordCounter& other) {
  for (const auto& [lemma, n] : other.counts_) counts_[lemma] += n;
  total_ += other.total_;
}

std::vector<KeywordCount> KeywordCounter::top(std::size_t k) const {
  std::vector<KeywordCount> all;
  all.reserve(counts_.size());
  for (const auto& [lemma, n] : counts_) all.push_back({lemma, n});
  auto better = [](const KeywordCount& a, const KeywordCount& b) {
    return a.mentions != b.mentions ? a.mentions > b.mentions : a.lemma < b.lemma;
  };
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
  all.resize(keep);
  return all;
}

std::vector<KeywordCount> top_keywords(std::span<const gkg::Article> articles, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "top_keywords needs k >= 1");
  KeywordCounter counter;
  for (const auto& a : articles) counter.add_title(a.record.title);
  return counter.top(k);
}

}  // namespace pulse::keywords
