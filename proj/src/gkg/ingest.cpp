#include "gkg/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <exception>
#include <thread>

#include "common/error.hpp"

namespace pulse::gkg {

namespace {

constexpr std::size_t kChunk = 1 << 16;

/// Splits a byte source into lines using a fixed-size chunk buffer.
class BufferedLineStream : public RecordStream {
 public:
  bool read_line(std::string& line) override {
    line.clear();
    while (true) {
      if (pos_ < len_) {
        const char* begin = buf_.get() + pos_;
        const void* nl = std::memchr(begin, '\n', len_ - pos_);
        if (nl) {
          const auto n = static_cast<const char*>(nl) - begin;
          line.append(begin, static_cast<std::size_t>(n));
          pos_ += static_cast<std::size_t>(n) + 1;
          strip_cr(line);
          return true;
        }
        line.append(begin, len_ - pos_);
        pos_ = len_;
      }
      if (eof_) {
        if (line.empty()) return false;
        strip_cr(line);
        return true;
      }
      fill();
      if (len_ == 0) eof_ = true;
    }
  }

 protected:
  // Reads up to `cap` bytes; returns 0 at end of input.
  virtual std::size_t read_bytes(char* dst, std::size_t cap) = 0;

 private:
  static void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  void fill() {
    if (!buf_) buf_ = std::make_unique<char[]>(kChunk);
    len_ = read_bytes(buf_.get(), kChunk);
    pos_ = 0;
  }

  std::unique_ptr<char[]> buf_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  bool eof_ = false;
};

class FileStream final : public BufferedLineStream {
 public:
  explicit FileStream(std::filesystem::path path) : path_(std::move(path)) {}

  ~FileStream() override {
    if (gz_) gzclose(gz_);
    if (file_) std::fclose(file_);
  }

  std::string name() const override { return path_.string(); }

 protected:
  std::size_t read_bytes(char* dst, std::size_t cap) override {
    if (!opened_) open();
    if (gz_) {
      const int n = gzread(gz_, dst, static_cast<unsigned>(cap));
      if (n < 0) {
        int err = 0;
        const char* msg = gzerror(gz_, &err);
        throw Error(Errc::source_unreadable, name() + ": " + (msg ? msg : "gzip read error"));
      }
      return static_cast<std::size_t>(n);
    }
    const auto n = std::fread(dst, 1, cap, file_);
    if (n == 0 && std::ferror(file_)) {
      throw Error(Errc::source_unreadable, name() + ": " + std::strerror(errno));
    }
    return n;
  }

 private:
  void open() {
    opened_ = true;
    std::error_code ec;
    if (std::filesystem::is_directory(path_, ec)) {
      throw Error(Errc::source_unreadable, name() + ": is a directory");
    }
    file_ = std::fopen(path_.c_str(), "rb");
    if (!file_) throw Error(Errc::source_unreadable, name() + ": " + std::strerror(errno));
    unsigned char magic[2] = {0, 0};
    const auto got = std::fread(magic, 1, 2, file_);
    if (got == 2 && magic[0] == 0x1f && magic[1] == 0x8b) {
      std::fclose(file_);
      file_ = nullptr;
      gz_ = gzopen(path_.c_str(), "rb");
      if (!gz_) throw Error(Errc::source_unreadable, name() + ": cannot open gzip stream");
      gzbuffer(gz_, kChunk);
    } else {
      std::rewind(file_);
    }
  }

  std::filesystem::path path_;
  bool opened_ = false;
  std::FILE* file_ = nullptr;
  gzFile gz_ = nullptr;
};

class MemoryStream final : public BufferedLineStream {
 public:
  MemoryStream(std::string text, std::string name) : text_(std::move(text)), name_(std::move(name)) {}

  std::string name() const override { return name_; }

 protected:
  std::size_t read_bytes(char* dst, std::size_t cap) override {
    const auto n = std::min(cap, text_.size() - off_);
    std::memcpy(dst, text_.data() + off_, n);
    off_ += n;
    return n;
  }

 private:
  std::string text_;
  std::string name_;
  std::size_t off_ = 0;
};

void ingest_one(RecordStream& source, const IngestOptions& options, DedupIndex& index,
                const std::function<void(const Article&)>& emit, IngestReport& report) {
  std::string line;
  Article article;
  while (true) {
    // Only stream errors are contained here; sink failures propagate.
    try {
      if (!source.read_line(line)) return;
    } catch (const Error& e) {
      report.failed_sources.push_back({source.name(), e.what()});
      return;
    }
    ++report.lines_read;
    if (!try_parse_gkg_line(line, options.layout, article.record)) {
      ++report.malformed;
      continue;
    }
    article.matched = matches_covid_criteria(article.record);
    if (options.apply_filter && article.matched.empty()) continue;
    ++report.criteria_matched;
    if (options.deduplicate && !index.insert(dedup_key(article.record))) {
      ++report.duplicates_dropped;
      continue;
    }
    ++report.emitted;
    emit(article);
  }
}

}  // namespace

std::unique_ptr<RecordStream> open_file_stream(std::filesystem::path path) {
  return std::make_unique<FileStream>(std::move(path));
}

std::unique_ptr<RecordStream> make_memory_stream(std::string text, std::string name) {
  return std::make_unique<MemoryStream>(std::move(text), std::move(name));
}

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  lines_read += other.lines_read;
  malformed += other.malformed;
  criteria_matched += other.criteria_matched;
  duplicates_dropped += other.duplicates_dropped;
  emitted += other.emitted;
  failed_sources.insert(failed_sources.end(), other.failed_sources.begin(), other.failed_sources.end());
  return *this;
}

nlohmann::json IngestReport::to_json() const {
  nlohmann::json j = {
      {"lines_read", lines_read},
      {"malformed", malformed},
      {"criteria_matched", criteria_matched},
      {"duplicates_dropped", duplicates_dropped},
      {"emitted", emitted},
      {"sources_failed", failed_sources.size()},
  };
  return j;
}

bool DedupIndex::insert(const DedupKey& key) {
  auto& shard = shards_[static_cast<std::size_t>(key.hi % kShards)];
  std::lock_guard lock(shard.mu);
  return shard.keys.insert(key).second;
}

std::size_t DedupIndex::size() const {
  std::size_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mu);
    n += s.keys.size();
  }
  return n;
}

IngestReport ingest(std::span<const std::unique_ptr<RecordStream>> sources, const ArticleSink& sink,
                    const IngestOptions& options) {
  DedupIndex index;
  IngestReport total;
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(sources.size())));

  if (jobs <= 1) {
    for (const auto& src : sources) ingest_one(*src, options, index, sink, total);
    return total;
  }

  std::mutex sink_mu;
  auto emit = [&](const Article& a) {
    std::lock_guard lock(sink_mu);
    sink(a);
  };
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::vector<IngestReport> partial(jobs);
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < sources.size(); i = next++) {
          ingest_one(*sources[i], options, index, emit, partial[w]);
        }
      } catch (...) {
        std::lock_guard lock(sink_mu);
        if (!failure) failure = std::current_exception();
        next = sources.size();
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace pulse::gkg
