#include "support/fixtures.hpp"

#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pipeline/pipeline.hpp"
#include "store/store.hpp"

namespace pulse::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return PULSE_TEST_DATA; }
fs::path golden_dir() { return PULSE_GOLDEN_DIR; }

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "pulse-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

// ---- generator -----------------------------------------------------------

namespace {

constexpr std::array<const char*, 24> kWords = {
    "market", "school", "vote",   "storm",  "senate", "trade",  "health", "virus",
    "vaccine", "travel", "budget", "police", "court",  "season", "energy", "oil",
    "outbreak", "hospital", "mask", "flight", "border", "rally",  "plan",   "report",
};
constexpr std::array<const char*, 9> kKeywordForms = {
    "Coronavirus", "COVID-19", "covid", "2019-nCoV", "nCoV-2019", "NCOV2019", "SARS-CoV-2", "coronaviruses", "Covid",
};
constexpr std::array<const char*, 5> kMatchThemes = {
    "WB_2167_PANDEMICS", "HEALTH_PANDEMIC", "TAX_DISEASE_CORONAVIRUS", "TAX_DISEASE_CORONAVIRUSES",
    "TAX_DISEASE_CORONAVIRUS_INFECTIONS",
};
constexpr std::array<const char*, 6> kOtherThemes = {
    "ECON_STOCKMARKET", "EDUCATION", "TAX_DISEASE_CORONAVIRUS_VARIANT", "health_pandemic", "WB_2167", "TAX_FNCACT",
};

std::string random_case(std::string s, std::mt19937_64& rng) {
  for (auto& c : s) {
    if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::string noisy_spacing(const std::string& s, std::mt19937_64& rng) {
  std::string out = rng() % 2 ? " " : "";
  for (char c : s) {
    out.push_back(c);
    if (c == ' ' && rng() % 2) out.push_back(' ');
  }
  if (rng() % 2) out.push_back(' ');
  return out;
}

std::string compact_date(int day_offset) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2020} / January / 1} + days{day_offset}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

std::vector<std::string> generate_gkg_lines(const CorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Pair {
    std::string publisher, title;
  };
  std::vector<Pair> seen;
  std::vector<std::string> lines;
  lines.reserve(spec.records);

  for (std::size_t i = 0; i < spec.records; ++i) {
    if (u(rng) < spec.malformed_rate) {
      switch (rng() % 6) {
        case 0: lines.push_back("20200318\tonly\tthree"); break;
        case 1: lines.push_back("2020-03-18\tx.com\thttps://x.com/" + std::to_string(i) + "\tcovid\t\t0"); break;
        case 2: lines.push_back("20200231\tx.com\thttps://x.com/" + std::to_string(i) + "\tcovid\t\t0"); break;
        case 3: lines.push_back("20200318\tx.com\thttps://x.com/" + std::to_string(i) + "\tcovid\t\tn/a"); break;
        case 4: lines.push_back("20200318\t   \thttps://x.com/" + std::to_string(i) + "\tcovid\t\t1"); break;
        default: lines.push_back("20200318\tx.com\thttps://x.com/" + std::to_string(i) + "\tcovid\t\t1\textra"); break;
      }
      continue;
    }

    std::string publisher, title;
    if (!seen.empty() && u(rng) < spec.duplicate_rate) {
      const auto& prev = seen[rng() % seen.size()];
      publisher = noisy_spacing(random_case(prev.publisher, rng), rng);
      title = noisy_spacing(random_case(prev.title, rng), rng);
    } else {
      publisher = "news" + std::to_string(rng() % 60) + (rng() % 3 ? ".com" : ".org");
      const int n = 2 + static_cast<int>(rng() % 6);
      for (int w = 0; w < n; ++w) {
        if (w) title += ' ';
        title += kWords[rng() % kWords.size()];
      }
      title += " " + std::to_string(rng() % 100000);
      if (u(rng) < spec.keyword_rate / 2) {
        title.insert(0, std::string(kKeywordForms[rng() % kKeywordForms.size()]) + " ");
      }
      seen.push_back({publisher, title});
    }

    std::string url = "https://" + publisher + "/";
    if (u(rng) < spec.keyword_rate / 2) url += std::string(kKeywordForms[rng() % kKeywordForms.size()]) + "/";
    url += "doc-" + std::to_string(i);

    std::string themes;
    const int nt = static_cast<int>(rng() % 3);
    for (int t = 0; t < nt; ++t) {
      if (!themes.empty()) themes += ';';
      themes += kOtherThemes[rng() % kOtherThemes.size()];
    }
    if (u(rng) < spec.theme_rate) {
      if (!themes.empty()) themes += ';';
      themes += kMatchThemes[rng() % kMatchThemes.size()];
    }

    std::string tone;
    if (rng() % 10) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", (u(rng) - 0.5) * 20);
      tone = buf;
    }
    lines.push_back(compact_date(static_cast<int>(rng() % 152)) + "\t" + publisher + "\t" + url + "\t" + title +
                    "\t" + themes + "\t" + tone);
  }
  return lines;
}

// ---- reference oracle ----------------------------------------------------

namespace {

std::string ref_trim(const std::string& s) {
  const char* ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string ref_lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> ref_split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool ref_valid_date(const std::string& s) {
  if (s.size() != 8) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(s.substr(0, 4))}, month{static_cast<unsigned>(std::stoi(s.substr(4, 2)))},
                           day{static_cast<unsigned>(std::stoi(s.substr(6, 2)))}};
  return ymd.ok();
}

bool ref_valid_tone(const std::string& raw) {
  const auto s = ref_trim(raw);
  if (s.empty()) return true;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace

ReferenceResult reference_ingest(const std::vector<std::string>& lines) {
  struct Candidate {
    std::string id, publisher, title;
  };
  ReferenceResult r;
  std::vector<Candidate> candidates;

  // Pass one: parse and filter.
  for (const auto& line : lines) {
    ++r.lines;
    const auto f = ref_split(line, '\t');
    if (f.size() != 6 || !ref_valid_date(ref_trim(f[0])) || ref_trim(f[1]).empty() || !ref_valid_tone(f[5])) {
      ++r.malformed;
      continue;
    }
    const auto title = ref_trim(f[3]);
    const auto haystack = ref_lower(title) + "\n" + ref_lower(ref_trim(f[2]));
    bool match = false;
    for (const char* kw : {"coronavirus", "covid", "2019-ncov", "ncov-2019", "ncov2019", "sars-cov-2"}) {
      if (haystack.find(kw) != std::string::npos) match = true;
    }
    for (const auto& theme : ref_split(f[4], ';')) {
      for (const char* code : {"WB_2167_PANDEMICS", "HEALTH_PANDEMIC", "TAX_DISEASE_CORONAVIRUS",
                               "TAX_DISEASE_CORONAVIRUSES", "TAX_DISEASE_CORONAVIRUS_INFECTIONS"}) {
        if (ref_trim(theme) == code) match = true;
      }
    }
    if (!match) continue;
    ++r.matched;
    candidates.push_back({ref_trim(f[2]), ref_trim(f[1]), title});
  }

  // Pass two: first occurrence per normalized pair.
  std::set<std::pair<std::string, std::string>> kept;
  for (const auto& c : candidates) {
    std::istringstream words(ref_lower(c.title));
    std::string word, normalized;
    while (words >> word) normalized += (normalized.empty() ? "" : " ") + word;
    if (kept.insert({ref_lower(c.publisher), normalized}).second) {
      r.emitted_ids.insert(c.id);
    } else {
      ++r.duplicates;
    }
  }
  return r;
}

double reference_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double a = x[i], b = y[i];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

// ---- fixture store -------------------------------------------------------

const FixturePlan& fixture_plan() {
  static const FixturePlan plan = [] {
    FixturePlan p;
    p.covid = {
        {"nature.com", 60},          {"science.org", 42},    {"foxnews.com", 1150}, {"cnn.com", 2000},
        {"nytimes.com", 1500},       {"reuters.com", 1000},  {"wsj.com", 500},      {"naturalnews.com", 100},
        {"infowars.com", 48},        {"realclearpolitics.com", 50},
    };
    p.baseline = {
        {"nature.com", 10},  {"science.org", 5},  {"foxnews.com", 100}, {"cnn.com", 200},
        {"nytimes.com", 150}, {"reuters.com", 100}, {"wsj.com", 50},      {"naturalnews.com", 10},
        {"infowars.com", 5},
    };
    std::size_t covid_rated = 0, base_rated = 0;
    for (const auto& [pub, n] : p.covid) covid_rated += n;
    for (const auto& [pub, n] : p.baseline) base_rated += n;
    // Unrated publishers fill the corpora to 10,000 and 1,000 articles.
    for (std::size_t i = 0; i < 10000 - covid_rated; ++i) ++p.covid["local" + std::to_string(i % 37) + ".example"];
    for (std::size_t i = 0; i < 1000 - base_rated; ++i) ++p.baseline["local" + std::to_string(i % 37) + ".example"];
    return p;
  }();
  return plan;
}

namespace {

constexpr std::array<const char*, 5> kCovidTitles = {
    "Coronavirus cases rise in Indiana as officials say schools close",
    "COVID-19 deaths climb, governor says",
    "New coronavirus testing sites open across the state",
    "Coronavirus news: what to know about the outbreak",
    "Trump says coronavirus task force will meet",
};

// Day 0 is 2020-03-09 (a Monday); weights rise linearly over two weeks.
std::string fixture_day(std::size_t i) {
  std::size_t slot = i % 105;
  int day = 0;
  while (slot >= static_cast<std::size_t>(day + 1)) {
    slot -= static_cast<std::size_t>(day + 1);
    ++day;
  }
  return compact_date(68 + day);
}

}  // namespace

fs::path build_fixture_store(const fs::path& root) {
  const auto inputs = root / "inputs";
  const auto store_dir = root / "store";
  fs::create_directories(inputs);

  std::vector<std::string> covid;
  std::size_t i = 0;
  for (const auto& [pub, n] : fixture_plan().covid) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      covid.push_back(fixture_day(i) + "\t" + pub + "\thttps://" + pub + "/story/" + std::to_string(i) + "\t" +
                      kCovidTitles[i % kCovidTitles.size()] + " (" + std::to_string(i) + ")\tHEALTH_PANDEMIC\t-1.5");
    }
  }
  for (std::size_t k = 0; k < 25; ++k) {
    const auto f = covid[k * 7];
    const auto tab1 = f.find('\t'), tab2 = f.find('\t', tab1 + 1);
    auto pub = f.substr(tab1 + 1, tab2 - tab1 - 1);
    for (auto& c : pub) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    covid.push_back(f.substr(0, tab1) + "\t" + pub + f.substr(tab2));
  }
  for (std::size_t k = 0; k < 40; ++k) {
    covid.push_back("20200315\treuters.com\thttps://reuters.com/markets/" + std::to_string(k) +
                    "\tStock market rallies " + std::to_string(k) + "\tECON_STOCKMARKET\t0.4");
  }
  covid.push_back("20200315\tbroken");
  covid.push_back("2020-03-15\tcnn.com\thttps://cnn.com/x\tcoronavirus\t\t1");
  covid.push_back("20200315\tcnn.com\thttps://cnn.com/y\tcoronavirus\t\tnot-a-number");

  std::vector<std::string> baseline;
  i = 0;
  for (const auto& [pub, n] : fixture_plan().baseline) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      char date[16];
      std::snprintf(date, sizeof date, "201901%02zu", 1 + i % 28);
      baseline.push_back(std::string(date) + "\t" + pub + "\thttps://" +
                         pub + "/2019/" + std::to_string(i) + "\tBudget talks continue " + std::to_string(i) +
                         "\tEPU_POLICY\t0.1");
    }
  }
  for (std::size_t k = 0; k < 5; ++k) baseline.push_back(baseline[k]);

  write_file(inputs / "covid.tsv", join_lines(covid));
  write_file(inputs / "baseline.tsv", join_lines(baseline));

  auto store = store::Store::open(store_dir, true);
  const std::vector<fs::path> covid_files{inputs / "covid.tsv"};
  const std::vector<fs::path> baseline_files{inputs / "baseline.tsv"};
  pipeline::ingest_gkg(store, covid_files, {});
  pipeline::GkgIngestOptions base_opts;
  base_opts.baseline = true;
  pipeline::ingest_gkg(store, baseline_files, base_opts);
  pipeline::load_bias(store, data_dir() / "mbfc.csv", data_dir() / "allsides.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::cases, data_dir() / "cases_wide.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::deaths, data_dir() / "deaths_wide.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::mobility, data_dir() / "mobility.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::distancing, data_dir() / "distancing.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::demographics, data_dir() / "demographics.csv");
  pipeline::ingest_signal(store, pipeline::SignalFile::trends, data_dir() / "trends.csv");
  pipeline::build_keywords(store, 10);
  for (auto a : {pipeline::Analysis::counts, pipeline::Analysis::bias, pipeline::Analysis::pearson,
                 pipeline::Analysis::shares, pipeline::Analysis::ratios}) {
    pipeline::analyze(store, a);
  }
  return store_dir;
}

std::vector<std::pair<std::string, std::string>> golden_targets() {
  return {
      {"/v1/manifest", "manifest.json"},
      {"/v1/series/articles", "series_articles_daily.json"},
      {"/v1/series/articles?granularity=weekly&from=2020-01-01&to=2020-05-31", "series_articles_weekly.json"},
      {"/v1/series/articles?from=2020-03-15&to=2020-03-17", "series_articles_window.json"},
      {"/v1/series/cases", "series_cases_us.json"},
      {"/v1/series/cases?region=Indiana&granularity=weekly", "series_cases_indiana_weekly.json"},
      {"/v1/series/deaths?region=Ohio", "series_deaths_ohio.json"},
      {"/v1/series/mobility/Indiana/parks", "series_mobility_indiana_parks.json"},
      {"/v1/series/distancing/Indiana", "series_distancing_indiana.json"},
      {"/v1/series/trends/coronavirus/Indiana", "series_trends_coronavirus_indiana.json"},
      {"/v1/series/trends/hand%20sanitizer/Indiana", "series_trends_sanitizer_indiana.json"},
      {"/v1/bias/counts?granularity=weekly", "bias_counts_weekly.json"},
      {"/v1/bias/counts?category=Scientific&from=2020-03-20", "bias_counts_scientific.json"},
      {"/v1/bias/shares", "bias_shares.json"},
      {"/v1/bias/ratios", "bias_ratios.json"},
      {"/v1/bias/pearson", "bias_pearson.json"},
      {"/v1/keywords/top", "keywords_top.json"},
      {"/v1/keywords/top?k=3", "keywords_top3.json"},
      {"/v1/series/unknown", "error_unknown_series.json"},
      {"/v1/series/mobility/Indiana/bowling", "error_unknown_mobility.json"},
      {"/v1/series/articles?granularity=hourly", "error_bad_granularity.json"},
      {"/v1/series/articles?from=2020-03-20&to=2020-03-01", "error_bad_range.json"},
      {"/v1/keywords/top?k=0", "error_bad_k.json"},
  };
}

}  // namespace pulse::testing
