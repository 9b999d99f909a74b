#include "store/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "common/error.hpp"

namespace pulse::store {

static_assert(std::endian::native == std::endian::little, "segment format assumes little-endian hosts");

namespace fs = std::filesystem;

namespace {

constexpr char kSegmentMagic[8] = {'P', 'L', 'S', 'S', 'E', 'G', '0', '1'};
constexpr const char* kManifestName = "manifest.json";
constexpr int kManifestFormat = 1;

[[noreturn]] void throw_write_error(const fs::path& path) {
  const int err = errno;
  if (err == ENOSPC || err == EDQUOT) throw Error(Errc::storage_full, path.string() + ": no space left");
  throw Error(Errc::io_error, path.string() + ": " + std::strerror(err));
}

void write_all(std::FILE* f, const void* data, std::size_t n, const fs::path& path) {
  if (n && std::fwrite(data, 1, n, f) != n) throw_write_error(path);
}

void flush_and_sync(std::FILE* f, const fs::path& path) {
  if (std::fflush(f) != 0) throw_write_error(path);
  if (::fsync(::fileno(f)) != 0) throw_write_error(path);
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::string random_suffix() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

std::string versioned_name(const char* prefix, std::uint64_t version, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%06llu%s", prefix, static_cast<unsigned long long>(version), ext);
  return buf;
}

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::corrupt_store, "missing store file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void encode_record(const Aggregate& a, unsigned char* out) {
  std::memset(out, 0, kRecordBytes);
  std::memcpy(out, a.key.metric.data(), a.key.metric.size());
  std::memcpy(out + kMetricBytes, a.key.category.data(), a.key.category.size());
  out[kMetricBytes + kCategoryBytes] = static_cast<unsigned char>(a.key.granularity);
  const std::int32_t days = a.key.date.days();
  std::memcpy(out + 116, &days, 4);
  std::memcpy(out + 120, &a.value, 8);
}

Aggregate decode_record(const unsigned char* in, const fs::path& path) {
  auto field = [](const unsigned char* p, std::size_t cap) {
    const auto* end = static_cast<const unsigned char*>(std::memchr(p, 0, cap));
    return std::string(reinterpret_cast<const char*>(p), end ? static_cast<std::size_t>(end - p) : cap);
  };
  Aggregate a;
  a.key.metric = field(in, kMetricBytes);
  a.key.category = field(in + kMetricBytes, kCategoryBytes);
  const auto g = in[kMetricBytes + kCategoryBytes];
  if (g > static_cast<unsigned char>(Granularity::total) || a.key.metric.empty()) {
    throw Error(Errc::corrupt_store, path.string() + ": invalid record");
  }
  a.key.granularity = static_cast<Granularity>(g);
  std::int32_t days = 0;
  std::memcpy(&days, in + 116, 4);
  a.key.date = Date::from_days(days);
  std::memcpy(&a.value, in + 120, 8);
  return a;
}

void apply_segment(std::map<AggregateKey, double>& data, const fs::path& path,
                   const std::vector<std::string>& replaces) {
  for (const auto& metric : replaces) {
    auto it = data.lower_bound(AggregateKey{metric, "", Granularity::daily, Date::from_days(INT32_MIN)});
    while (it != data.end() && it->first.metric == metric) it = data.erase(it);
  }
  const auto bytes = read_file(path);
  if (bytes.size() < kSegmentHeaderBytes || std::memcmp(bytes.data(), kSegmentMagic, 8) != 0) {
    throw Error(Errc::corrupt_store, path.string() + ": bad segment header");
  }
  std::uint32_t count = 0, crc = 0;
  std::memcpy(&count, bytes.data() + 8, 4);
  std::memcpy(&crc, bytes.data() + 12, 4);
  if (bytes.size() != kSegmentHeaderBytes + std::size_t{count} * kRecordBytes) {
    throw Error(Errc::corrupt_store, path.string() + ": truncated segment");
  }
  const auto* body = reinterpret_cast<const unsigned char*>(bytes.data()) + kSegmentHeaderBytes;
  const auto actual = static_cast<std::uint32_t>(
      ::crc32(0L, body, static_cast<uInt>(std::size_t{count} * kRecordBytes)));
  if (actual != crc) throw Error(Errc::corrupt_store, path.string() + ": checksum mismatch");
  for (std::uint32_t i = 0; i < count; ++i) {
    auto a = decode_record(body + std::size_t{i} * kRecordBytes, path);
    data[std::move(a.key)] = a.value;
  }
}

std::map<std::string, DateRange> compute_coverage(const std::map<AggregateKey, double>& data) {
  std::map<std::string, DateRange> out;
  for (const auto& [key, v] : data) {
    if (key.granularity != Granularity::daily) continue;
    auto [it, inserted] = out.try_emplace(key.metric, DateRange{key.date, key.date});
    if (!inserted) {
      it->second.first = std::min(it->second.first, key.date);
      it->second.last = std::max(it->second.last, key.date);
    }
  }
  return out;
}

Manifest read_manifest(const fs::path& dir) {
  const auto path = dir / kManifestName;
  if (!fs::exists(path)) throw Error(Errc::not_found, "no store manifest at " + dir.string());
  try {
    return Manifest::from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::corrupt_store, path.string() + ": " + e.what());
  }
}

void write_manifest_file(const fs::path& path, const Manifest& m) {
  const auto text = m.to_json().dump(2) + "\n";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw_write_error(path);
  try {
    write_all(f, text.data(), text.size(), path);
    flush_and_sync(f, path);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
}

class WriterLock {
 public:
  explicit WriterLock(const fs::path& dir) {
    const auto path = dir / "LOCK";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error(Errc::io_error, "cannot open " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(Errc::io_error, "cannot lock " + path.string());
    }
  }
  ~WriterLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::daily: return "daily";
    case Granularity::weekly: return "weekly";
    case Granularity::total: return "total";
  }
  return "unknown";
}

std::optional<Granularity> granularity_from_string(std::string_view s) {
  if (s == "daily") return Granularity::daily;
  if (s == "weekly") return Granularity::weekly;
  if (s == "total") return Granularity::total;
  return std::nullopt;
}

void validate_key(const AggregateKey& key) {
  if (key.metric.empty()) throw Error(Errc::invalid_argument, "aggregate metric must not be empty");
  if (key.metric.size() > kMetricBytes || key.category.size() > kCategoryBytes) {
    throw Error(Errc::key_too_long, "aggregate key too long: " + key.metric + "/" + key.category);
  }
  if (key.metric.find('\0') != std::string::npos || key.category.find('\0') != std::string::npos) {
    throw Error(Errc::invalid_argument, "aggregate key contains NUL");
  }
}

// --- Manifest ------------------------------------------------------------

nlohmann::json Manifest::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : segments) segs.push_back({{"file", s.file}, {"replaces", s.replaces}});
  nlohmann::json cov = nlohmann::json::object();
  for (const auto& [metric, range] : coverage) {
    cov[metric] = {{"from", range.first.iso()}, {"to", range.last.iso()}};
  }
  return {
      {"format", kManifestFormat}, {"version", version}, {"segments", segs},
      {"blobs", blobs},            {"reports", reports}, {"coverage", cov},
  };
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  if (j.at("format").get<int>() != kManifestFormat) {
    throw Error(Errc::corrupt_store, "unsupported manifest format");
  }
  Manifest m;
  m.version = j.at("version").get<std::uint64_t>();
  for (const auto& s : j.at("segments")) {
    m.segments.push_back({s.at("file").get<std::string>(), s.at("replaces").get<std::vector<std::string>>()});
  }
  m.blobs = j.at("blobs").get<std::map<std::string, std::string>>();
  m.reports = j.at("reports");
  for (const auto& [metric, r] : j.at("coverage").items()) {
    auto from = Date::parse_iso(r.at("from").get<std::string>());
    auto to = Date::parse_iso(r.at("to").get<std::string>());
    if (!from || !to) throw Error(Errc::corrupt_store, "manifest coverage has a bad date");
    m.coverage[metric] = DateRange{*from, *to};
  }
  return m;
}

// --- Snapshot ------------------------------------------------------------

std::shared_ptr<const Snapshot> Snapshot::load(const fs::path& dir) {
  auto snap = std::make_shared<Snapshot>();
  snap->dir_ = dir;
  snap->manifest_ = read_manifest(dir);
  for (const auto& seg : snap->manifest_.segments) {
    apply_segment(snap->data_, dir / seg.file, seg.replaces);
  }
  return snap;
}

std::vector<SeriesPoint> Snapshot::read_series(std::string_view metric, std::string_view category,
                                               Granularity granularity,
                                               std::optional<DateRange> range) const {
  std::vector<SeriesPoint> out;
  const Date lo = range ? range->first : Date::from_days(INT32_MIN);
  auto it = data_.lower_bound(AggregateKey{std::string(metric), std::string(category), granularity, lo});
  for (; it != data_.end(); ++it) {
    const auto& k = it->first;
    if (k.metric != metric || k.category != category || k.granularity != granularity) break;
    if (range && k.date > range->last) break;
    out.push_back({k.date, it->second});
  }
  return out;
}

std::optional<double> Snapshot::value(const AggregateKey& key) const {
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Snapshot::categories(std::string_view metric, Granularity granularity) const {
  std::vector<std::string> out;
  auto it = data_.lower_bound(AggregateKey{std::string(metric), "", Granularity::daily, Date::from_days(INT32_MIN)});
  for (; it != data_.end() && it->first.metric == metric; ++it) {
    if (it->first.granularity != granularity) continue;
    if (out.empty() || out.back() != it->first.category) out.push_back(it->first.category);
  }
  return out;
}

bool Snapshot::has_series(std::string_view metric, std::string_view category, Granularity granularity) const {
  auto it = data_.lower_bound(
      AggregateKey{std::string(metric), std::string(category), granularity, Date::from_days(INT32_MIN)});
  return it != data_.end() && it->first.metric == metric && it->first.category == category &&
         it->first.granularity == granularity;
}

bool Snapshot::has_metric(std::string_view metric) const {
  auto it = data_.lower_bound(AggregateKey{std::string(metric), "", Granularity::daily, Date::from_days(INT32_MIN)});
  return it != data_.end() && it->first.metric == metric;
}

std::optional<fs::path> Snapshot::blob_path(std::string_view name) const {
  auto it = manifest_.blobs.find(std::string(name));
  if (it == manifest_.blobs.end()) return std::nullopt;
  return dir_ / it->second;
}

// --- BlobWriter ----------------------------------------------------------

BlobWriter::BlobWriter(fs::path tmp, std::string extension)
    : tmp_(std::move(tmp)), extension_(std::move(extension)) {
  file_ = std::fopen(tmp_.c_str(), "wb");
  if (!file_) throw_write_error(tmp_);
}

BlobWriter::~BlobWriter() {
  if (file_) std::fclose(file_);
}

void BlobWriter::write(std::string_view bytes) { write_all(file_, bytes.data(), bytes.size(), tmp_); }

void BlobWriter::write_line(std::string_view line) {
  write(line);
  write("\n");
}

void BlobWriter::finish() {
  flush_and_sync(file_, tmp_);
  std::fclose(file_);
  file_ = nullptr;
}

// --- Transaction ---------------------------------------------------------

Transaction::Transaction(fs::path dir) : dir_(std::move(dir)) {}

Transaction::Transaction(Transaction&& other) noexcept
    : dir_(std::move(other.dir_)),
      batch_(std::move(other.batch_)),
      replaces_(std::move(other.replaces_)),
      blobs_(std::move(other.blobs_)),
      reports_(std::move(other.reports_)),
      done_(other.done_) {
  other.done_ = true;
}

Transaction::~Transaction() {
  if (!done_) discard();
}

void Transaction::discard() noexcept {
  for (auto& [name, w] : blobs_) {
    std::error_code ec;
    const auto tmp = w->tmp_;
    w.reset();
    fs::remove(tmp, ec);
  }
  blobs_.clear();
  batch_.clear();
  done_ = true;
}

void Transaction::put(AggregateKey key, double value) { batch_.push_back({std::move(key), value}); }

void Transaction::replace_metric(std::string metric) { replaces_.push_back(std::move(metric)); }

BlobWriter& Transaction::blob(const std::string& name, const std::string& extension) {
  auto& slot = blobs_[name];
  if (!slot) {
    auto tmp = dir_ / ("tmp-blob-" + sanitize(name) + "-" + random_suffix());
    slot.reset(new BlobWriter(std::move(tmp), extension));
  }
  return *slot;
}

void Transaction::add_report(nlohmann::json report) { reports_.push_back(std::move(report)); }

std::uint64_t Transaction::commit(const CommitOptions& options) {
  if (done_) throw Error(Errc::invalid_argument, "transaction already finished");
  const auto& dir = dir_;

  std::vector<Aggregate> sorted;
  try {
    for (const auto& a : batch_) validate_key(a.key);
    sorted = batch_;
    std::sort(sorted.begin(), sorted.end(), [](const Aggregate& a, const Aggregate& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].key == sorted[i - 1].key) {
        const auto& k = sorted[i].key;
        throw Error(Errc::duplicate_key_in_batch, "batch repeats key " + k.metric + "/" + k.category + "/" +
                                                      std::string(to_string(k.granularity)) + "/" + k.date.iso());
      }
    }
  } catch (...) {
    discard();
    throw;
  }

  WriterLock lock(dir);
  std::shared_ptr<const Snapshot> current;
  try {
    current = Snapshot::load(dir);
  } catch (...) {
    discard();
    throw;
  }
  Manifest next = current->manifest();
  next.version = current->version() + 1;
  auto data = current->data();

  try {
    // Segment.
    if (!sorted.empty() || !replaces_.empty()) {
      const auto final_name = versioned_name("seg-", next.version, ".dat");
      const auto tmp = dir / ("tmp-seg-" + random_suffix());
      std::vector<unsigned char> body(sorted.size() * kRecordBytes);
      for (std::size_t i = 0; i < sorted.size(); ++i) encode_record(sorted[i], body.data() + i * kRecordBytes);
      const auto count = static_cast<std::uint32_t>(sorted.size());
      const auto crc = static_cast<std::uint32_t>(::crc32(0L, body.data(), static_cast<uInt>(body.size())));
      unsigned char header[kSegmentHeaderBytes];
      std::memcpy(header, kSegmentMagic, 8);
      std::memcpy(header + 8, &count, 4);
      std::memcpy(header + 12, &crc, 4);

      std::FILE* f = std::fopen(tmp.c_str(), "wb");
      if (!f) throw_write_error(tmp);
      try {
        write_all(f, header, sizeof header, tmp);
        write_all(f, body.data(), body.size(), tmp);
        flush_and_sync(f, tmp);
      } catch (...) {
        std::fclose(f);
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
      }
      std::fclose(f);
      fs::rename(tmp, dir / final_name);
      next.segments.push_back({final_name, replaces_});

      for (const auto& metric : replaces_) {
        auto it = data.lower_bound(AggregateKey{metric, "", Granularity::daily, Date::from_days(INT32_MIN)});
        while (it != data.end() && it->first.metric == metric) it = data.erase(it);
      }
      for (const auto& a : sorted) data[a.key] = a.value;
    }

    // Blobs.
    for (auto& [name, writer] : blobs_) {
      writer->finish();
      const auto final_name =
          "blob-" + sanitize(name) + "-" + versioned_name("", next.version, ("." + writer->extension_).c_str());
      fs::rename(writer->tmp_, dir / final_name);
      next.blobs[name] = final_name;
    }
    blobs_.clear();
    sync_dir(dir);

    if (options.crash == CrashPoint::after_segment) {
      throw Error(Errc::simulated_crash, "simulated crash before manifest write");
    }

    for (auto& r : reports_) next.reports.push_back(std::move(r));
    next.coverage = compute_coverage(data);

    const auto tmp_manifest = dir / (std::string(kManifestName) + ".tmp-" + random_suffix());
    write_manifest_file(tmp_manifest, next);
    if (options.crash == CrashPoint::after_manifest_temp) {
      throw Error(Errc::simulated_crash, "simulated crash before manifest rename");
    }
    fs::rename(tmp_manifest, dir / kManifestName);
    sync_dir(dir);
  } catch (const fs::filesystem_error& e) {
    discard();
    if (e.code() == std::errc::no_space_on_device) throw Error(Errc::storage_full, e.what());
    throw Error(Errc::io_error, e.what());
  } catch (...) {
    discard();
    throw;
  }
  done_ = true;
  return next.version;
}

// --- Store ---------------------------------------------------------------

Store Store::open(const fs::path& dir, bool create) {
  const auto manifest = dir / kManifestName;
  if (!fs::exists(manifest)) {
    if (!create) throw Error(Errc::not_found, "no store at " + dir.string());
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create store directory " + dir.string() + ": " + ec.message());
    WriterLock lock(dir);
    if (!fs::exists(manifest)) {
      const auto tmp = dir / (std::string(kManifestName) + ".tmp-" + random_suffix());
      write_manifest_file(tmp, Manifest{});
      fs::rename(tmp, manifest);
      sync_dir(dir);
    }
  }
  read_manifest(dir);
  return Store(dir);
}

std::uint64_t Store::current_version() const { return read_manifest(dir_).version; }

std::shared_ptr<const Snapshot> Store::snapshot() const { return Snapshot::load(dir_); }

Transaction Store::begin() const { return Transaction(dir_); }

std::uint64_t Store::write_aggregates(std::span<const Aggregate> batch, const CommitOptions& options) {
  auto tx = begin();
  for (const auto& a : batch) tx.put(a);
  return tx.commit(options);
}

}  // namespace pulse::store
