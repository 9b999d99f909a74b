#include "pulse/pulse.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "analytics/analytics.hpp"
#include "bias/registry.hpp"
#include "common/error.hpp"
#include "gkg/record.hpp"
#include "pipeline/pipeline.hpp"
#include "signals/signals.hpp"
#include "store/server.hpp"
#include "store/store.hpp"

struct pulse_store {
  pulse::store::Store store;
};

struct pulse_registry {
  pulse::bias::Registry registry;
};

struct pulse_server {
  std::unique_ptr<pulse::api::Server> server;
};

namespace {

using pulse::Errc;
using pulse::Error;

thread_local std::string g_error;
thread_local std::string g_code;

pulse_status status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::wrong_kind:
    case Errc::wrong_granularity:
    case Errc::length_mismatch:
    case Errc::duplicate_key_in_batch:
    case Errc::key_too_long:
      return PULSE_INVALID_ARGUMENT;
    case Errc::io_error:
    case Errc::source_unreadable:
    case Errc::storage_full:
      return PULSE_IO_ERROR;
    case Errc::malformed_record:
    case Errc::unknown_label:
    case Errc::duplicate_publisher:
    case Errc::empty_input:
    case Errc::missing_weekday:
    case Errc::unknown_category:
    case Errc::duplicate_date:
    case Errc::missing_population:
    case Errc::percent_out_of_range:
    case Errc::share_group_mismatch:
    case Errc::non_finite:
    case Errc::zero_total:
    case Errc::zero_variance:
    case Errc::empty_corpus:
    case Errc::negative_share:
      return PULSE_BAD_DATA;
    case Errc::not_found:
      return PULSE_NOT_FOUND;
    case Errc::corrupt_store:
      return PULSE_CORRUPT_STORE;
    case Errc::bind_failure:
      return PULSE_BIND_FAILURE;
    case Errc::simulated_crash:
      return PULSE_INTERNAL;
  }
  return PULSE_INTERNAL;
}

pulse_status fail(pulse_status status, std::string code, std::string message) {
  g_code = std::move(code);
  g_error = std::move(message);
  return status;
}

template <class F>
pulse_status guarded(F&& f) {
  try {
    g_error.clear();
    g_code.clear();
    f();
    return PULSE_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), std::string(pulse::to_string(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PULSE_INTERNAL, "out_of_memory", "out of memory");
  } catch (const std::exception& e) {
    return fail(PULSE_INTERNAL, "internal", e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

std::optional<pulse::Date> optional_date(const char* s, const char* what) {
  if (!s || !*s) return std::nullopt;
  auto d = pulse::Date::parse_iso(s);
  if (!d) throw Error(Errc::invalid_argument, std::string(what) + " must be YYYY-MM-DD");
  return d;
}

}  // namespace

extern "C" {

const char* pulse_last_error(void) { return g_error.c_str(); }
const char* pulse_last_error_code(void) { return g_code.c_str(); }

void pulse_free(char* s) { std::free(s); }

pulse_status pulse_store_open(const char* dir, int create, pulse_store** out) {
  return guarded([&] {
    require(dir && out, "dir and out are required");
    *out = new pulse_store{pulse::store::Store::open(dir, create != 0)};
  });
}

void pulse_store_close(pulse_store* store) { delete store; }

pulse_status pulse_store_version(const pulse_store* store, uint64_t* out) {
  return guarded([&] {
    require(store && out, "store and out are required");
    *out = store->store.current_version();
  });
}

void pulse_ingest_options_init(pulse_ingest_options* options) {
  if (options) *options = pulse_ingest_options{0, 0, 1, 1};
}

pulse_status pulse_ingest_gkg(pulse_store* store, const char* const* files, size_t n_files,
                              const pulse_ingest_options* options, char** report_json) {
  return guarded([&] {
    require(store && (files || n_files == 0), "store and files are required");
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < n_files; ++i) {
      require(files[i] != nullptr, "file path is null");
      paths.emplace_back(files[i]);
    }
    pulse::pipeline::GkgIngestOptions opts;
    if (options) {
      opts.layout = options->raw_gkg ? pulse::gkg::Layout::raw_gkg : pulse::gkg::Layout::normalized;
      opts.baseline = options->baseline != 0;
      opts.deduplicate = options->deduplicate != 0;
      opts.jobs = options->jobs == 0 ? 1 : options->jobs;
    }
    const auto report = pulse::pipeline::ingest_gkg(store->store, paths, opts);
    set_out(report_json, report.to_json().dump());
  });
}

pulse_status pulse_load_bias(pulse_store* store, const char* mbfc_csv, const char* allsides_csv,
                             char** summary_json) {
  return guarded([&] {
    require(store != nullptr, "store is required");
    require((mbfc_csv && *mbfc_csv) || (allsides_csv && *allsides_csv), "at least one ratings file is required");
    const auto registry =
        pulse::pipeline::load_bias(store->store, mbfc_csv ? mbfc_csv : "", allsides_csv ? allsides_csv : "");
    set_out(summary_json, nlohmann::json{{"publishers", registry.size()}}.dump());
  });
}

pulse_status pulse_ingest_signal(pulse_store* store, const char* kind, const char* file, const char* region,
                                 char** summary_json) {
  return guarded([&] {
    require(store && kind && file, "store, kind and file are required");
    auto k = pulse::pipeline::signal_file_from_string(kind);
    if (!k) throw Error(Errc::invalid_argument, std::string("unknown signal kind '") + kind + "'");
    std::optional<std::string> r;
    if (region && *region) r = region;
    const auto summary = pulse::pipeline::ingest_signal(store->store, *k, file, r);
    auto j = summary.to_json();
    j["warning_messages"] = summary.warnings;
    set_out(summary_json, j.dump());
  });
}

pulse_status pulse_keywords(pulse_store* store, size_t k, int as_json, char** out) {
  return guarded([&] {
    require(store && out, "store and out are required");
    const auto top = pulse::pipeline::build_keywords(store->store, k);
    if (as_json) {
      auto arr = nlohmann::json::array();
      for (const auto& kc : top) arr.push_back({{"lemma", kc.lemma}, {"mentions", kc.mentions}});
      *out = dup(arr.dump(2) + "\n");
    } else {
      std::string csv = "lemma,mentions\n";
      for (const auto& kc : top) csv += kc.lemma + "," + std::to_string(kc.mentions) + "\n";
      *out = dup(csv);
    }
  });
}

pulse_status pulse_analyze(pulse_store* store, const char* what, const char* from, const char* to, int as_json,
                           char** out) {
  return guarded([&] {
    require(store && what && out, "store, what and out are required");
    auto a = pulse::pipeline::analysis_from_string(what);
    if (!a) throw Error(Errc::invalid_argument, std::string("unknown analysis '") + what + "'");
    const auto result =
        pulse::pipeline::analyze(store->store, *a, optional_date(from, "from"), optional_date(to, "to"));
    *out = dup(as_json ? pulse::pipeline::to_json(result) : pulse::pipeline::to_csv(result));
  });
}

pulse_status pulse_export(pulse_store* store, const char* metric, const char* granularity, int as_json,
                          char** out) {
  return guarded([&] {
    require(store && metric && out, "store, metric and out are required");
    std::optional<pulse::store::Granularity> g;
    if (granularity && *granularity) {
      g = pulse::store::granularity_from_string(granularity);
      if (!g) throw Error(Errc::invalid_argument, "granularity must be daily, weekly or total");
    }
    const auto snap = store->store.snapshot();
    const auto result = pulse::pipeline::export_metric(*snap, metric, g);
    *out = dup(as_json ? pulse::pipeline::to_json(result) : pulse::pipeline::to_csv(result));
  });
}

pulse_status pulse_api_get(pulse_store* store, const char* target, int* http_status, char** body) {
  return guarded([&] {
    require(store && target && http_status && body, "store, target, http_status and body are required");
    const auto snap = store->store.snapshot();
    auto [path, query] = pulse::api::split_target(target);
    const auto r = pulse::api::handle(*snap, "GET", path, query);
    *http_status = r.status;
    *body = dup(r.body.dump());
  });
}

pulse_status pulse_server_start(const char* store_dir, const char* bind, const char* static_dir,
                                pulse_server** out) {
  return guarded([&] {
    require(store_dir && bind && out, "store_dir, bind and out are required");
    std::optional<std::filesystem::path> st;
    if (static_dir && *static_dir) st = static_dir;
    auto server = std::make_unique<pulse::api::Server>(store_dir, st);
    server->bind(bind);
    server->start();
    *out = new pulse_server{std::move(server)};
  });
}

int pulse_server_port(const pulse_server* server) { return server ? server->server->port() : 0; }

void pulse_server_stop(pulse_server* server) { delete server; }

pulse_status pulse_serve(const char* store_dir, const char* bind, const char* static_dir,
                         void (*on_ready)(int port, void* user), void* user) {
  return guarded([&] {
    require(store_dir && bind, "store_dir and bind are required");
    std::optional<std::filesystem::path> st;
    if (static_dir && *static_dir) st = static_dir;
    pulse::api::Server server(store_dir, st);
    const int port = server.bind(bind);
    if (on_ready) on_ready(port, user);
    server.run();
  });
}

pulse_status pulse_registry_load(const char* mbfc_csv, const char* allsides_csv, pulse_registry** out) {
  return guarded([&] {
    require(out != nullptr, "out is required");
    *out = new pulse_registry{
        pulse::bias::Registry::load_files(mbfc_csv ? mbfc_csv : "", allsides_csv ? allsides_csv : "")};
  });
}

void pulse_registry_free(pulse_registry* registry) { delete registry; }

const char* pulse_registry_resolve(const pulse_registry* registry, const char* publisher) {
  const auto label = registry && publisher ? registry->registry.resolve(publisher) : pulse::bias::BiasLabel::unrated;
  // Display names are backed by string literals.
  return pulse::bias::to_string(label).data();
}

pulse_status pulse_grade_distancing(double reduction, char* grade) {
  return guarded([&] {
    require(grade != nullptr, "grade is required");
    *grade = pulse::signals::to_char(pulse::signals::grade_distancing(reduction));
  });
}

pulse_status pulse_pearson(const double* x, size_t nx, const double* y, size_t ny, double* out) {
  return guarded([&] {
    require((x || nx == 0) && (y || ny == 0) && out, "x, y and out are required");
    *out = pulse::analytics::pearson({x, nx}, {y, ny});
  });
}

pulse_status pulse_dedup_key(const char* publisher, const char* title, char hex[33]) {
  return guarded([&] {
    require(publisher && title && hex, "publisher, title and hex are required");
    const auto s = pulse::gkg::to_hex(pulse::gkg::dedup_key(publisher, title));
    std::memcpy(hex, s.c_str(), 33);
  });
}

pulse_status pulse_normalize_interest(const double* shares, size_t n, double* out) {
  return guarded([&] {
    require((shares && out) || n == 0, "shares and out are required");
    std::vector<pulse::signals::Point> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {pulse::Date::from_days(static_cast<int32_t>(i)), shares[i]};
    const auto norm = pulse::signals::normalize_interest(pts);
    for (size_t i = 0; i < n; ++i) out[i] = norm[i].value;
  });
}

pulse_status pulse_parse_gkg_line(const char* line, int raw_gkg, char** record_json) {
  return guarded([&] {
    require(line && record_json, "line and record_json are required");
    const auto r = pulse::gkg::parse_gkg_line(line, raw_gkg ? pulse::gkg::Layout::raw_gkg
                                                            : pulse::gkg::Layout::normalized);
    const auto matched = pulse::gkg::matches_covid_criteria(r);
    auto criteria = nlohmann::json::array();
    if (matched.contains(pulse::gkg::Criterion::title_url_keyword)) criteria.push_back("title_url_keyword");
    if (matched.contains(pulse::gkg::Criterion::theme_match)) criteria.push_back("theme_match");
    const nlohmann::json j = {{"record_date", r.record_date.iso()},
                              {"publisher", r.publisher},
                              {"document_identifier", r.document_identifier},
                              {"title", r.title},
                              {"themes", r.themes},
                              {"tone", r.tone},
                              {"covid_related", !matched.empty()},
                              {"matched_criteria", criteria},
                              {"dedup_key", pulse::gkg::to_hex(pulse::gkg::dedup_key(r))}};
    *record_json = dup(j.dump());
  });
}

}  // extern "C"
