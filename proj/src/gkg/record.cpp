#include "gkg/record.hpp"

#include <sodium.h>

#include <cstring>

#include "common/error.hpp"
#include "common/text.hpp"

namespace pulse::gkg {

namespace {

// Splits on '\t' into at most `max_fields + 1` views so that an over-long
// line is detectable without scanning the whole tail.
std::size_t split_tabs(std::string_view line, std::string_view* fields, std::size_t max_fields) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (n == max_fields) return n + 1;
    if (tab == std::string_view::npos) {
      fields[n++] = line.substr(start);
      return n;
    }
    fields[n++] = line.substr(start, tab - start);
    start = tab + 1;
  }
}

void split_themes(std::string_view field, std::vector<std::string>& out, bool strip_offsets) {
  out.clear();
  std::size_t start = 0;
  while (start <= field.size()) {
    auto semi = field.find(';', start);
    if (semi == std::string_view::npos) semi = field.size();
    auto token = text::trim(field.substr(start, semi - start));
    if (strip_offsets) {
      if (auto comma = token.find(','); comma != std::string_view::npos) token = token.substr(0, comma);
    }
    if (!token.empty()) out.emplace_back(token);
    start = semi + 1;
  }
}

bool parse_tone(std::string_view field, double& tone) {
  field = text::trim(field);
  if (field.empty()) {
    tone = 0.0;
    return true;
  }
  auto v = text::parse_double(field);
  if (!v) return false;
  tone = *v;
  return true;
}

void decode_xml_entities(std::string_view in, std::string& out) {
  out.clear();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '&') {
      static constexpr std::pair<std::string_view, char> kEntities[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''},
      };
      bool matched = false;
      for (auto [name, ch] : kEntities) {
        if (in.substr(i, name.size()) == name) {
          out.push_back(ch);
          i += name.size() - 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(in[i]);
  }
}

bool fail(std::string* reason, const char* why) {
  if (reason) *reason = why;
  return false;
}

bool parse_normalized(std::string_view line, GkgRecord& out, std::string* reason) {
  std::string_view f[kNormalizedColumns + 1];
  const auto n = split_tabs(line, f, kNormalizedColumns);
  if (n != kNormalizedColumns) return fail(reason, "wrong column count");

  auto date = Date::parse_compact(text::trim(f[0]));
  if (!date) return fail(reason, "unparseable date");
  const auto publisher = text::trim(f[1]);
  if (publisher.empty()) return fail(reason, "empty publisher");
  double tone = 0;
  if (!parse_tone(f[5], tone)) return fail(reason, "unparseable tone");

  out.record_date = *date;
  out.publisher.assign(publisher);
  out.document_identifier.assign(text::trim(f[2]));
  out.title.assign(text::trim(f[3]));
  split_themes(f[4], out.themes, false);
  out.tone = tone;
  return true;
}

bool parse_raw(std::string_view line, GkgRecord& out, std::string* reason) {
  std::string_view f[kRawGkgColumns + 1];
  const auto n = split_tabs(line, f, kRawGkgColumns);
  if (n != kRawGkgColumns) return fail(reason, "wrong column count");

  // V2.1DATE is YYYYMMDDHHMMSS.
  const auto stamp = text::trim(f[1]);
  auto date = stamp.size() >= 8 ? Date::parse_compact(stamp.substr(0, 8)) : std::nullopt;
  if (!date) return fail(reason, "unparseable date");
  const auto publisher = text::trim(f[3]);
  if (publisher.empty()) return fail(reason, "empty publisher");

  // V1.5TONE is a comma list; the first entry is the document tone.
  auto tone_field = f[15];
  if (auto comma = tone_field.find(','); comma != std::string_view::npos) {
    tone_field = tone_field.substr(0, comma);
  }
  double tone = 0;
  if (!parse_tone(tone_field, tone)) return fail(reason, "unparseable tone");

  out.record_date = *date;
  out.publisher.assign(publisher);
  out.document_identifier.assign(text::trim(f[4]));

  static constexpr std::string_view kOpen = "<PAGE_TITLE>";
  static constexpr std::string_view kClose = "</PAGE_TITLE>";
  out.title.clear();
  const auto extras = f[26];
  if (auto b = extras.find(kOpen); b != std::string_view::npos) {
    const auto start = b + kOpen.size();
    const auto e = extras.find(kClose, start);
    const auto raw = extras.substr(start, e == std::string_view::npos ? std::string_view::npos : e - start);
    decode_xml_entities(text::trim(raw), out.title);
  }

  if (!text::trim(f[7]).empty()) {
    split_themes(f[7], out.themes, false);
  } else {
    split_themes(f[8], out.themes, true);  // V2ENHANCEDTHEMES: THEME,offset;...
  }
  out.tone = tone;
  return true;
}

bool contains_keyword(std::string_view haystack, std::string& scratch) {
  scratch.assign(haystack);
  for (auto& c : scratch) c = text::lower_ascii(c);
  for (auto kw : kCovidKeywords) {
    if (std::string_view(scratch).find(kw) != std::string_view::npos) return true;
  }
  return false;
}

void append_normalized_title(std::string_view title, std::string& out) {
  bool pending_space = false;
  bool started = false;
  for (char c : title) {
    if (text::is_space(c)) {
      pending_space = started;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(text::lower_ascii(c));
    started = true;
  }
}

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw Error(Errc::invalid_argument, "libsodium failed to initialize");
  }
};

}  // namespace

bool try_parse_gkg_line(std::string_view line, Layout layout, GkgRecord& out, std::string* reason) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return layout == Layout::normalized ? parse_normalized(line, out, reason)
                                      : parse_raw(line, out, reason);
}

GkgRecord parse_gkg_line(std::string_view line, Layout layout) {
  GkgRecord record;
  std::string reason;
  if (!try_parse_gkg_line(line, layout, record, &reason)) {
    throw Error(Errc::malformed_record, "malformed GKG record: " + reason);
  }
  return record;
}

std::string format_gkg_line(const GkgRecord& r) {
  std::string out = r.record_date.iso();
  // Compact date: drop the dashes.
  out.erase(7, 1);
  out.erase(4, 1);
  out.push_back('\t');
  out += r.publisher;
  out.push_back('\t');
  out += r.document_identifier;
  out.push_back('\t');
  out += r.title;
  out.push_back('\t');
  for (std::size_t i = 0; i < r.themes.size(); ++i) {
    if (i) out.push_back(';');
    out += r.themes[i];
  }
  out.push_back('\t');
  out += text::format_double(r.tone);
  return out;
}

CriteriaSet matches_covid_criteria(const GkgRecord& record) {
  thread_local std::string scratch;
  CriteriaSet set;
  if (contains_keyword(record.title, scratch) || contains_keyword(record.document_identifier, scratch)) {
    set.insert(Criterion::title_url_keyword);
  }
  for (const auto& theme : record.themes) {
    bool hit = false;
    for (auto code : kCovidThemes) {
      if (theme == code) {
        hit = true;
        break;
      }
    }
    if (hit) {
      set.insert(Criterion::theme_match);
      break;
    }
  }
  return set;
}

std::string normalize_dedup_publisher(std::string_view publisher) {
  return text::to_lower(text::trim(publisher));
}

std::string normalize_dedup_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  append_normalized_title(title, out);
  return out;
}

DedupKey dedup_key(std::string_view publisher, std::string_view title) {
  static const SodiumInit init;
  thread_local std::string buf;
  buf.clear();

  // Length-prefixed publisher so ("ab","c") and ("a","bc") never collide.
  const auto pub = text::trim(publisher);
  const std::uint64_t pub_len = pub.size();
  unsigned char len_bytes[8];
  for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<unsigned char>(pub_len >> (8 * i));
  buf.append(reinterpret_cast<const char*>(len_bytes), 8);
  for (char c : pub) buf.push_back(text::lower_ascii(c));
  append_normalized_title(title, buf);

  unsigned char digest[16];
  crypto_generichash(digest, sizeof digest, reinterpret_cast<const unsigned char*>(buf.data()),
                     buf.size(), nullptr, 0);
  DedupKey key;
  for (int i = 0; i < 8; ++i) {
    key.hi = (key.hi << 8) | digest[i];
    key.lo = (key.lo << 8) | digest[8 + i];
  }
  return key;
}

std::string to_hex(const DedupKey& key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(key.hi >> (4 * i)) & 0xF];
    out[31 - i] = kDigits[(key.lo >> (4 * i)) & 0xF];
  }
  return out;
}

}  // namespace pulse::gkg
