#include "store/api.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "bias/registry.hpp"
#include "common/error.hpp"
#include "pipeline/pipeline.hpp"
#include "signals/signals.hpp"

namespace pulse::api {

namespace {

namespace metric = pipeline::metric;
using store::Granularity;
using nlohmann::json;

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void bad_request(std::string message) { throw HttpError{400, "bad_request", std::move(message)}; }
[[noreturn]] void not_found(std::string message) { throw HttpError{404, "not_found", std::move(message)}; }

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    auto part = path.substr(0, slash);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

std::optional<std::string_view> param(const Query& q, std::string_view name) {
  auto it = q.find(name);
  if (it == q.end()) return std::nullopt;
  return std::string_view(it->second);
}

struct SeriesParams {
  Granularity granularity = Granularity::daily;
  std::optional<DateRange> range;
};

SeriesParams series_params(const Query& q) {
  SeriesParams p;
  if (auto g = param(q, "granularity")) {
    if (*g == "daily") {
      p.granularity = Granularity::daily;
    } else if (*g == "weekly") {
      p.granularity = Granularity::weekly;
    } else {
      bad_request("granularity must be daily or weekly");
    }
  }
  std::optional<Date> from, to;
  if (auto f = param(q, "from")) {
    from = Date::parse_iso(*f);
    if (!from) bad_request("from must be YYYY-MM-DD");
  }
  if (auto t = param(q, "to")) {
    to = Date::parse_iso(*t);
    if (!to) bad_request("to must be YYYY-MM-DD");
  }
  if (from || to) {
    DateRange r{from.value_or(Date::from_days(INT32_MIN / 2)), to.value_or(Date::from_days(INT32_MAX / 2))};
    if (r.empty()) bad_request("from is after to");
    p.range = r;
  }
  return p;
}

json points_json(const std::vector<store::SeriesPoint>& points) {
  auto arr = json::array();
  for (const auto& p : points) arr.push_back({{"date", p.date.iso()}, {"value", number(p.value)}});
  return arr;
}

json series(const store::Snapshot& snap, std::string_view m, std::string_view category, const Query& q) {
  const auto p = series_params(q);
  if (!snap.has_series(m, category, p.granularity)) {
    not_found("no " + std::string(store::to_string(p.granularity)) + " series " + std::string(m) + " for '" +
              std::string(category) + "'");
  }
  return points_json(snap.read_series(m, category, p.granularity, p.range));
}

json distancing(const store::Snapshot& snap, std::string_view state, const Query& q) {
  const auto p = series_params(q);
  if (p.granularity != Granularity::daily) bad_request("distancing is daily only");
  if (!snap.has_series(metric::distancing_reduction, state, Granularity::daily)) {
    not_found("no distancing series for '" + std::string(state) + "'");
  }
  auto arr = json::array();
  for (const auto& pt : snap.read_series(metric::distancing_reduction, state, Granularity::daily, p.range)) {
    const char grade = signals::to_char(signals::grade_distancing(pt.value));
    arr.push_back({{"date", pt.date.iso()}, {"value", number(pt.value)}, {"grade", std::string(1, grade)}});
  }
  return arr;
}

json per_label_totals(const store::Snapshot& snap, std::string_view m) {
  if (!snap.has_metric(m)) not_found("no " + std::string(m) + " stored; run the matching analysis first");
  json out = json::object();
  for (auto label : bias::kAllLabels) {
    const auto name = std::string(bias::to_string(label));
    auto v = snap.value({std::string(m), name, Granularity::total, Date::from_days(0)});
    if (v) out[name] = number(*v);
  }
  return out;
}

json bias_counts(const store::Snapshot& snap, const Query& q) {
  const auto p = series_params(q);
  if (!snap.has_metric(metric::bias_count)) not_found("no bias counts stored; run `analyze bias` first");
  std::optional<bias::BiasLabel> only;
  if (auto c = param(q, "category")) {
    only = bias::label_from_string(*c);
    if (!only) bad_request("unknown category '" + std::string(*c) + "'");
  }
  json out = json::object();
  for (auto label : bias::kAllLabels) {
    if (only ? label != *only : label == bias::BiasLabel::unrated) continue;
    const auto name = std::string(bias::to_string(label));
    if (!snap.has_series(metric::bias_count, name, p.granularity)) continue;
    out[name] = points_json(snap.read_series(metric::bias_count, name, p.granularity, p.range));
  }
  return out;
}

json keywords_top(const store::Snapshot& snap, const Query& q) {
  std::size_t k = 10;
  if (auto s = param(q, "k")) {
    auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), k);
    if (ec != std::errc{} || ptr != s->data() + s->size() || k == 0) bad_request("k must be a positive integer");
  }
  if (!snap.has_metric(metric::keyword_mentions)) not_found("no keywords stored; run `keywords` first");
  std::vector<std::pair<std::string, double>> all;
  for (const auto& lemma : snap.categories(metric::keyword_mentions, Granularity::total)) {
    all.emplace_back(lemma, *snap.value({std::string(metric::keyword_mentions), lemma, Granularity::total,
                                         Date::from_days(0)}));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  auto arr = json::array();
  for (const auto& [lemma, n] : all) arr.push_back({{"lemma", lemma}, {"mentions", number(n)}});
  return arr;
}

json manifest(const store::Snapshot& snap) {
  const auto& m = snap.manifest();
  json coverage = json::object();
  for (const auto& [name, range] : m.coverage) {
    coverage[name] = {{"from", range.first.iso()}, {"to", range.last.iso()}};
  }
  std::set<std::string> metrics;
  for (const auto& [key, v] : snap.data()) metrics.insert(key.metric);
  return {{"version", m.version}, {"coverage", coverage}, {"metrics", metrics}, {"reports", m.reports}};
}

json route(const store::Snapshot& snap, std::string_view path, const Query& q) {
  const auto parts = split_path(path);
  auto is = [&](std::initializer_list<std::string_view> prefix) {
    if (parts.size() != prefix.size()) return false;
    return std::equal(prefix.begin(), prefix.end(), parts.begin());
  };
  auto region = [&] { return std::string(param(q, "region").value_or("US")); };

  if (parts.size() < 2 || parts[0] != "v1") not_found("unknown endpoint " + std::string(path));
  if (is({"v1", "manifest"})) return manifest(snap);
  if (is({"v1", "series", "articles"})) return series(snap, metric::articles, pipeline::kAllCategory, q);
  if (is({"v1", "series", "cases"})) return series(snap, metric::cases_new, region(), q);
  if (is({"v1", "series", "deaths"})) return series(snap, metric::deaths_new, region(), q);
  if (parts.size() == 5 && parts[1] == "series" && parts[2] == "mobility") {
    return series(snap, metric::mobility_change, std::string(parts[3]) + "/" + std::string(parts[4]), q);
  }
  if (parts.size() == 4 && parts[1] == "series" && parts[2] == "distancing") return distancing(snap, parts[3], q);
  if (parts.size() == 5 && parts[1] == "series" && parts[2] == "trends") {
    return series(snap, metric::trends_interest, std::string(parts[3]) + "/" + std::string(parts[4]), q);
  }
  if (is({"v1", "bias", "counts"})) return bias_counts(snap, q);
  if (is({"v1", "bias", "shares"})) return per_label_totals(snap, metric::bias_share);
  if (is({"v1", "bias", "ratios"})) return per_label_totals(snap, metric::bias_ratio);
  if (is({"v1", "bias", "pearson"})) return per_label_totals(snap, metric::bias_pearson);
  if (is({"v1", "keywords", "top"})) return keywords_top(snap, q);
  not_found("unknown endpoint " + std::string(path));
}

}  // namespace

json number(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  if (v == std::trunc(v) && std::fabs(v) < 9007199254740992.0) return static_cast<std::int64_t>(v);
  return v;
}

std::string percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex(s[i + 1]) >= 0 && hex(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2])));
      i += 2;
    } else if (s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::pair<std::string, Query> split_target(std::string_view target) {
  const auto qmark = target.find('?');
  std::pair<std::string, Query> out;
  out.first = percent_decode(target.substr(0, qmark));
  if (qmark == std::string_view::npos) return out;
  auto rest = target.substr(qmark + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      auto key = percent_decode(pair.substr(0, eq));
      auto value = eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1));
      out.second.emplace(std::move(key), std::move(value));
    }
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return out;
}

Response handle(const store::Snapshot& snap, std::string_view method, std::string_view path, const Query& query) {
  if (method != "GET" && method != "HEAD") {
    return {405, {{"error", "method_not_allowed"}, {"message", "the API is read-only"}}};
  }
  try {
    return {200, route(snap, path, query)};
  } catch (const HttpError& e) {
    return {e.status, {{"error", e.code}, {"message", e.message}}};
  } catch (const Error& e) {
    return {500, {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
  }
}

}  // namespace pulse::api
