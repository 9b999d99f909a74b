#include "bias/registry.hpp"

#include <fstream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace pulse::bias {

namespace {

constexpr std::array<std::string_view, kLabelCount> kNames = {
    "Left",
    "Left-center",
    "Least Biased",
    "Right-center",
    "Right",
    "Scientific",
    "Questionable Sources",
    "Conspiracy-pseudoscience",
    "Mixed",
    "Unrated",
};

std::string_view rater_name(Rater r) { return r == Rater::mbfc ? "MBFC" : "AllSides"; }

}  // namespace

std::string_view to_string(BiasLabel label) { return kNames[index_of(label)]; }

std::optional<BiasLabel> label_from_string(std::string_view name) {
  name = text::trim(name);
  for (auto label : kAllLabels) {
    if (text::iequals(name, kNames[index_of(label)])) return label;
  }
  return std::nullopt;
}

bool rater_can_assign(Rater rater, BiasLabel label) {
  switch (label) {
    case BiasLabel::left:
    case BiasLabel::left_center:
    case BiasLabel::least_biased:
    case BiasLabel::right_center:
    case BiasLabel::right:
      return true;
    case BiasLabel::scientific:
    case BiasLabel::questionable_sources:
    case BiasLabel::conspiracy_pseudoscience:
      return rater == Rater::mbfc;
    case BiasLabel::mixed:
      return rater == Rater::allsides;
    case BiasLabel::unrated:
      return false;
  }
  return false;
}

std::string normalize_publisher(std::string_view publisher) {
  auto out = text::to_lower(text::trim(publisher));
  if (out.rfind("www.", 0) == 0) out.erase(0, 4);
  return out;
}

void Registry::add(Rater rater, std::string_view publisher, BiasLabel label) {
  if (!rater_can_assign(rater, label)) {
    throw Error(Errc::unknown_label, std::string(rater_name(rater)) + " cannot assign label '" +
                                         std::string(to_string(label)) + "'");
  }
  auto key = normalize_publisher(publisher);
  if (key.empty()) throw Error(Errc::invalid_argument, "empty publisher in ratings table");

  auto [it, inserted] = ratings_.try_emplace(key);
  auto& rating = it->second;
  if (inserted) rating.publisher = key;
  auto& slot = rater == Rater::mbfc ? rating.mbfc : rating.allsides;
  if (slot) {
    throw Error(Errc::duplicate_publisher,
                std::string(rater_name(rater)) + " table lists '" + key + "' more than once");
  }
  slot = label;
}

void Registry::load_table(std::istream& in, Rater rater) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return;
  const csv::Header header(row);
  const auto pub_col = header.find("publisher");
  const auto label_col = header.find("label");
  if (!pub_col || !label_col) {
    throw Error(Errc::invalid_argument, std::string(rater_name(rater)) +
                                            " table needs a 'publisher,label' header");
  }
  while (reader.next(row)) {
    if (row.size() != header.size()) {
      throw Error(Errc::invalid_argument, std::string(rater_name(rater)) + " table line " +
                                              std::to_string(reader.line_number()) +
                                              ": wrong column count");
    }
    const auto label_text = text::trim(row[*label_col]);
    auto label = label_from_string(label_text);
    if (!label || !rater_can_assign(rater, *label)) {
      throw Error(Errc::unknown_label, std::string(rater_name(rater)) + " table line " +
                                           std::to_string(reader.line_number()) + ": unknown label '" +
                                           std::string(label_text) + "'");
    }
    add(rater, row[*pub_col], *label);
  }
}

Registry Registry::load(std::istream* mbfc, std::istream* allsides) {
  Registry reg;
  if (mbfc) reg.load_table(*mbfc, Rater::mbfc);
  if (allsides) reg.load_table(*allsides, Rater::allsides);
  return reg;
}

Registry Registry::load_files(const std::filesystem::path& mbfc, const std::filesystem::path& allsides) {
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error(Errc::io_error, "cannot open ratings file " + p.string());
    return in;
  };
  std::ifstream m, a;
  if (!mbfc.empty()) m = open(mbfc);
  if (!allsides.empty()) a = open(allsides);
  return load(mbfc.empty() ? nullptr : &m, allsides.empty() ? nullptr : &a);
}

const SourceRating* Registry::find(std::string_view publisher) const {
  auto it = ratings_.find(normalize_publisher(publisher));
  return it == ratings_.end() ? nullptr : &it->second;
}

BiasLabel Registry::resolve(std::string_view publisher) const {
  const auto* r = find(publisher);
  if (!r) return BiasLabel::unrated;
  if (r->mbfc) return *r->mbfc;
  if (r->allsides) return *r->allsides;
  return BiasLabel::unrated;
}

nlohmann::json Registry::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& [key, r] : ratings_) {
    nlohmann::json row = {{"publisher", key}};
    row["mbfc"] = r.mbfc ? nlohmann::json(std::string(to_string(*r.mbfc))) : nlohmann::json();
    row["allsides"] = r.allsides ? nlohmann::json(std::string(to_string(*r.allsides))) : nlohmann::json();
    arr.push_back(std::move(row));
  }
  return arr;
}

Registry Registry::from_json(const nlohmann::json& j) {
  Registry reg;
  for (const auto& row : j) {
    const auto pub = row.at("publisher").get<std::string>();
    for (auto [field, rater] : {std::pair{"mbfc", Rater::mbfc}, std::pair{"allsides", Rater::allsides}}) {
      const auto& v = row.at(field);
      if (v.is_null()) continue;
      auto label = label_from_string(v.get<std::string>());
      if (!label) throw Error(Errc::corrupt_store, "stored registry has unknown label");
      reg.add(rater, pub, *label);
    }
  }
  return reg;
}

}  // namespace pulse::bias
