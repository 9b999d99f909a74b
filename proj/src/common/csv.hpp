#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::csv {

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines). Fields are
/// returned unquoted and untrimmed.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field if it contains a delimiter, quote, or newline.
std::string escape(std::string_view field);

/// Line-oriented CSV reader. Blank lines are skipped; a UTF-8 BOM on the first
/// line is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& fields);
  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

/// Header row with case-insensitive column lookup.
class Header {
 public:
  Header() = default;
  explicit Header(std::vector<std::string> names);

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t size() const { return names_.size(); }
  const std::string& operator[](std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

}  // namespace pulse::csv
