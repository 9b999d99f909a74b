#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulse/pulse.h"

namespace {

int report_failure(pulse_status st) {
  std::cerr << "pulse: " << pulse_last_error_code() << ": " << pulse_last_error() << "\n";
  return static_cast<int>(st);
}

struct Owned {
  char* p = nullptr;
  ~Owned() { pulse_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

// "csv" and "json" write to stdout; anything else is a path whose extension
// picks the format.
struct OutTarget {
  bool json = false;
  std::string path;
};

OutTarget parse_out(const std::string& out) {
  if (out.empty() || out == "csv" || out == "-") return {false, ""};
  if (out == "json") return {true, ""};
  const bool json = out.size() >= 5 && out.compare(out.size() - 5, 5, ".json") == 0;
  return {json, out};
}

int emit(const OutTarget& target, const std::string& text) {
  if (target.path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(target.path, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "pulse: cannot write " << target.path << "\n";
    return PULSE_IO_ERROR;
  }
  return 0;
}

struct StoreHandle {
  pulse_store* s = nullptr;
  ~StoreHandle() { pulse_store_close(s); }
};

void on_ready(int port, void* user) {
  const auto* bind = static_cast<const std::string*>(user);
  const auto host = bind->substr(0, bind->rfind(':'));
  std::cerr << "serving http://" << (host.empty() ? "127.0.0.1" : host) << ":" << port << "/v1\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse: news and epidemic signal ingestion and analytics"};
  app.require_subcommand(1);
  std::string store = "pulse-store";
  app.add_option("--store", store, "Store directory")->envname("PULSE_STORE");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Ingest news or signal files");
  ingest->require_subcommand(1);

  auto* gkg = ingest->add_subcommand("gkg", "GKG news records");
  std::vector<std::string> gkg_files;
  bool raw_gkg = false, baseline = false, no_dedup = false;
  unsigned jobs = 1;
  std::string report_path;
  gkg->add_option("files", gkg_files, "Input files (plain or gzip)")->required();
  gkg->add_flag("--raw-gkg", raw_gkg, "Input uses the 27-column GKG 2.1 layout");
  gkg->add_flag("--baseline", baseline, "Store as the unfiltered baseline corpus");
  gkg->add_flag("--no-dedup", no_dedup, "Keep duplicate (publisher, title) records");
  gkg->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  gkg->add_option("--report", report_path, "Write the ingest report JSON here");

  std::string signal_file, region;
  bool deaths = false;
  std::vector<std::pair<std::string, CLI::App*>> signal_cmds;
  for (const char* kind : {"cases", "mobility", "distancing", "demographics", "trends"}) {
    auto* sub = ingest->add_subcommand(kind, std::string("Ingest a ") + kind + " CSV");
    sub->add_option("file", signal_file, "Input CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--region", region, "Only keep this region");
    if (std::string(kind) == "cases") sub->add_flag("--deaths", deaths, "File holds cumulative deaths");
    signal_cmds.emplace_back(kind, sub);
  }

  // bias
  auto* bias = app.add_subcommand("bias", "Bias ratings");
  bias->require_subcommand(1);
  auto* bias_load = bias->add_subcommand("load", "Load MBFC and AllSides tables");
  std::string mbfc, allsides;
  bias_load->add_option("--mbfc", mbfc, "MBFC CSV (publisher,label)")->check(CLI::ExistingFile);
  bias_load->add_option("--allsides", allsides, "AllSides CSV (publisher,label)")->check(CLI::ExistingFile);

  // keywords
  auto* kw = app.add_subcommand("keywords", "Rank title keywords");
  std::size_t top = 10;
  std::string kw_out = "csv";
  kw->add_option("--top", top, "Number of keywords")->check(CLI::PositiveNumber);
  kw->add_option("--out", kw_out, "csv, json, or an output path");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute and store derived metrics");
  std::string what, from, to, an_out = "csv";
  analyze->add_option("what", what, "counts|bias|pearson|shares|ratios")
      ->required()
      ->check(CLI::IsMember({"counts", "bias", "pearson", "shares", "ratios"}));
  analyze->add_option("--from", from, "First day (YYYY-MM-DD)");
  analyze->add_option("--to", to, "Last day (YYYY-MM-DD)");
  analyze->add_option("--out", an_out, "csv, json, or an output path");

  // export
  auto* exp = app.add_subcommand("export", "Export a stored metric");
  std::string metric, granularity, ex_out = "csv";
  exp->add_option("--metric", metric, "Metric name")->required();
  exp->add_option("--granularity", granularity, "daily, weekly or total");
  exp->add_option("--out", ex_out, "csv, json, or an output path");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the read-only /v1 JSON API");
  std::string bind = "127.0.0.1:8080", static_dir;
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--static", static_dir, "Directory of dashboard assets to serve at /");

  CLI11_PARSE(app, argc, argv);

  const std::string dir = store;
  pulse_status st = PULSE_OK;

  if (serve->parsed()) {
    st = pulse_serve(dir.c_str(), bind.c_str(), static_dir.c_str(), on_ready, &bind);
    return st == PULSE_OK ? 0 : report_failure(st);
  }

  StoreHandle h;
  const bool writes = ingest->parsed() || bias->parsed();
  if ((st = pulse_store_open(dir.c_str(), writes ? 1 : 0, &h.s)) != PULSE_OK) return report_failure(st);

  if (gkg->parsed()) {
    std::vector<const char*> files;
    for (const auto& f : gkg_files) files.push_back(f.c_str());
    pulse_ingest_options opts;
    pulse_ingest_options_init(&opts);
    opts.raw_gkg = raw_gkg;
    opts.baseline = baseline;
    opts.deduplicate = !no_dedup;
    opts.jobs = jobs;
    Owned report;
    if ((st = pulse_ingest_gkg(h.s, files.data(), files.size(), &opts, &report.p)) != PULSE_OK) {
      return report_failure(st);
    }
    std::cout << report.str() << "\n";
    if (!report_path.empty()) return emit({true, report_path}, report.str() + "\n");
    return 0;
  }

  for (const auto& [kind, sub] : signal_cmds) {
    if (!sub->parsed()) continue;
    const std::string k = kind == "cases" && deaths ? "deaths" : kind;
    Owned summary;
    st = pulse_ingest_signal(h.s, k.c_str(), signal_file.c_str(), region.empty() ? nullptr : region.c_str(),
                             &summary.p);
    if (st != PULSE_OK) return report_failure(st);
    std::cout << summary.str() << "\n";
    return 0;
  }

  if (bias_load->parsed()) {
    Owned summary;
    if ((st = pulse_load_bias(h.s, mbfc.c_str(), allsides.c_str(), &summary.p)) != PULSE_OK) {
      return report_failure(st);
    }
    std::cout << summary.str() << "\n";
    return 0;
  }

  if (kw->parsed()) {
    const auto target = parse_out(kw_out);
    Owned text;
    if ((st = pulse_keywords(h.s, top, target.json, &text.p)) != PULSE_OK) return report_failure(st);
    return emit(target, text.str());
  }

  if (analyze->parsed()) {
    const auto target = parse_out(an_out);
    Owned text;
    st = pulse_analyze(h.s, what.c_str(), from.empty() ? nullptr : from.c_str(), to.empty() ? nullptr : to.c_str(),
                       target.json, &text.p);
    if (st != PULSE_OK) return report_failure(st);
    return emit(target, text.str());
  }

  if (exp->parsed()) {
    const auto target = parse_out(ex_out);
    Owned text;
    st = pulse_export(h.s, metric.c_str(), granularity.empty() ? nullptr : granularity.c_str(), target.json,
                      &text.p);
    if (st != PULSE_OK) return report_failure(st);
    return emit(target, text.str());
  }
  return 0;
}
