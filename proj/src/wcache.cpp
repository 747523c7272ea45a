#include "sudler/wcache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace sudler {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using Key = std::tuple<std::size_t, int, int, int>;

Key key_of(const WCacheEntry& e) {
  return {left_word_index(Pattern::parse(e.pattern)), e.n0, e.T, e.m};
}

// flock on <dir>/.lock, released on destruction
class DirLock {
 public:
  DirLock(const fs::path& dir, bool exclusive) {
    fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open lock file in " + dir.string());
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw std::runtime_error("cannot lock " + dir.string());
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<WCacheEntry> parse_lines(const std::string& text, const fs::path& file,
                                     std::vector<std::string>* warnings) {
  std::vector<WCacheEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(entry_from_json_line(line));
    } catch (const std::exception& ex) {
      if (warnings)
        warnings->push_back(file.string() + ":" + std::to_string(lineno) +
                            ": skipped corrupt record (" + ex.what() + ")");
    }
  }
  return out;
}

}  // namespace

std::string entry_to_json_line(const WCacheEntry& e) {
  json j;
  j["pattern"] = e.pattern;
  j["n0"] = e.n0;
  j["T"] = e.T;
  j["m"] = e.m;
  j["W"] = e.W;
  j["restarts"] = e.restarts;
  j["created_at"] = e.created_at;
  return j.dump();
}

WCacheEntry entry_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw std::invalid_argument(ex.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  WCacheEntry e;
  try {
    e.pattern = j.at("pattern").get<std::string>();
    e.n0 = j.at("n0").get<int>();
    e.T = j.at("T").get<int>();
    e.m = j.at("m").get<int>();
    e.W = j.at("W").get<double>();
    e.restarts = j.at("restarts").get<int>();
    e.created_at = j.value("created_at", std::string{});
  } catch (const json::exception& ex) {
    throw std::invalid_argument(ex.what());
  }
  Pattern::parse(e.pattern);  // validates
  if (!(e.W >= 0)) throw std::invalid_argument("negative W");
  return e;
}

std::string representative_pattern(std::size_t left_index) {
  const auto w = left_word_from_index(left_index);  // (c_4, c_3, c_2, c_1)
  std::string s;
  for (std::size_t i = 4; i-- > 0;) s += static_cast<char>('0' + w[i]);
  return s + "11111";
}

WCache::WCache(fs::path dir) : dir_(std::move(dir)), file_(dir_ / "wcache.jsonl") {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_)) throw std::runtime_error("cache directory " + dir_.string() + " is not usable");
  if (::access(dir_.c_str(), W_OK) != 0)
    throw std::runtime_error("cache directory " + dir_.string() + " is not writable");
}

std::vector<WCacheEntry> WCache::load(std::vector<std::string>* warnings) const {
  std::string text;
  {
    DirLock lock(dir_, false);
    text = read_all(file_);
  }
  return parse_lines(text, file_, warnings);
}

std::optional<WCacheEntry> WCache::get(const Pattern& c, const FParams& params) const {
  const std::size_t left = left_word_index(c);
  for (const auto& e : load()) {
    if (e.params() == params && left_word_index(Pattern::parse(e.pattern)) == left) return e;
  }
  return std::nullopt;
}

std::size_t WCache::put(std::span<const WCacheEntry> entries) {
  DirLock lock(dir_, true);
  std::string text = read_all(file_);
  std::set<Key> have;
  for (const auto& e : parse_lines(text, file_, nullptr)) have.insert(key_of(e));

  std::size_t added = 0;
  if (!text.empty() && text.back() != '\n') text += '\n';
  for (const auto& e : entries) {
    if (!(e.W >= 0)) throw std::invalid_argument("negative W");
    if (!have.insert(key_of(e)).second) continue;
    WCacheEntry rec = e;
    if (rec.created_at.empty()) rec.created_at = utc_now();
    text += entry_to_json_line(rec);
    text += '\n';
    ++added;
  }
  if (added == 0) return 0;

  const fs::path tmp = dir_ / (".wcache.jsonl.tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file_, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot replace " + file_.string() + ": " + ec.message());
  }
  return added;
}

WTable cached_w_table(const FParams& params, int jobs, WCache* cache, std::size_t* hits,
                      std::vector<std::string>* warnings) {
  std::vector<WCacheEntry> known;
  if (cache) known = cache->load(warnings);
  std::array<std::optional<WEntry>, kLeftWordCount> pre;
  for (const auto& e : known) {
    if (e.params() != params) continue;
    auto& slot = pre[left_word_index(Pattern::parse(e.pattern))];
    if (!slot) slot = WEntry{e.W, e.restarts};
  }
  std::vector<std::size_t> computed;
  WTable w = compute_w_table(
      params, jobs, [&](std::size_t i) { return pre[i]; }, &computed);
  if (hits) *hits = kLeftWordCount - computed.size();
  if (cache && !computed.empty()) {
    std::vector<WCacheEntry> fresh;
    for (std::size_t i : computed)
      fresh.push_back({representative_pattern(i), params.n0, params.T, params.m, w[i].W,
                       w[i].restarts, ""});
    cache->put(fresh);
  }
  return w;
}

}  // namespace sudler
