#pragma once

// Persistent W values: one JSON record per line in <dir>/wcache.jsonl.
//
// W only depends on the left word (c_1..c_4) of a pattern, so records are
// written under the representative pattern c_1 c_2 c_3 c_4 11111, while
// lookups accept any pattern with the same left word.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sudler/ffamily.hpp"
#include "sudler/verify.hpp"

namespace sudler {

struct WCacheEntry {
  std::string pattern;  // 9 digits
  int n0 = 0, T = 0, m = 0;
  double W = 0;
  int restarts = 0;
  std::string created_at;  // ISO 8601, UTC

  FParams params() const { return {n0, T, m}; }
};

std::string entry_to_json_line(const WCacheEntry& e);
/// Throws std::invalid_argument on malformed records (including W < 0).
WCacheEntry entry_from_json_line(std::string_view line);

/// c_1..c_4 followed by 11111.
std::string representative_pattern(std::size_t left_index);

class WCache {
 public:
  /// Creates dir if needed; throws std::runtime_error if it is not writable.
  explicit WCache(std::filesystem::path dir);

  const std::filesystem::path& file() const noexcept { return file_; }

  /// Every readable record; corrupt lines are skipped and reported in warnings.
  std::vector<WCacheEntry> load(std::vector<std::string>* warnings = nullptr) const;

  std::optional<WCacheEntry> get(const Pattern& c, const FParams& params) const;

  /// Adds the records whose (left word, n0, T, m) is not present yet. The
  /// file is rewritten through a temporary and a rename under an exclusive
  /// lock. Returns the number of records added.
  std::size_t put(std::span<const WCacheEntry> entries);
  std::size_t put(const WCacheEntry& e) { return put(std::span<const WCacheEntry>(&e, 1)); }

 private:
  std::filesystem::path dir_;
  std::filesystem::path file_;
};

/// The W table at params, served from the cache where possible. Newly
/// computed values are stored back. hits receives the number of cached roots.
WTable cached_w_table(const FParams& params, int jobs, WCache* cache, std::size_t* hits = nullptr,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace sudler
