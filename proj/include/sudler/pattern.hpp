#pragma once

// Patterns c = (a_{k-3}, ..., a_{k+5}) in {1,2,3}^9 and the extremal values
// of alpha_{k+1}, the reversal, lambda_k and lambda_{k,j} over all alpha in
// E_3 that show the pattern at index k.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sudler/contfrac.hpp"

namespace sudler {

constexpr std::size_t kPatternLength = 9;
constexpr std::size_t kPatternCount = 19683;  // 3^9

class Pattern {
 public:
  Pattern() { digits_.fill(1); }
  explicit Pattern(const std::array<int, kPatternLength>& digits);

  /// "123123123"
  static Pattern parse(std::string_view text);
  /// Lexicographic rank with c_1 most significant, 0 .. 19682.
  static Pattern from_index(std::size_t index);

  /// c_i for i = 1..9.
  int c(std::size_t i) const { return digits_.at(i - 1); }
  const std::array<int, kPatternLength>& digits() const noexcept { return digits_; }
  std::size_t index() const noexcept;
  std::string str() const;

  /// (c_4, c_3, c_2, c_1), the root word for the reversal subdivision.
  std::vector<int> left_word() const { return {digits_[3], digits_[2], digits_[1], digits_[0]}; }

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern&, const Pattern&) = default;

 private:
  std::array<int, kPatternLength> digits_{};
};

/// c(alpha, k) = (a_{k-3}, ..., a_{k+5}); needs k >= 4 and digits <= 3.
Pattern pattern_at(const ContinuedFraction& alpha, std::size_t k);

/// [0; B, (3,1)] for even |B|, [0; B, (1,3)] for odd |B|: the smallest
/// number whose expansion starts with B and has digits in {1,2,3}.
ContinuedFraction cf_min_expansion(std::span<const int> word);
/// The largest such number (periods swapped).
ContinuedFraction cf_max_expansion(std::span<const int> word);
double cf_min(std::span<const int> word);
double cf_max(std::span<const int> word);
inline double cf_min(std::initializer_list<int> w) { return cf_min(std::span<const int>(w.begin(), w.size())); }
inline double cf_max(std::initializer_list<int> w) { return cf_max(std::span<const int>(w.begin(), w.size())); }

struct PatternBounds {
  double vec_min = 0, vec_max = 0;  // extremes of alpha_{k+1}
  double cev_min = 0, cev_max = 0;  // extremes of the reversal [0; a_k, ..., a_1]
  double lambda_min = 0, lambda_max = 0;
  std::array<double, 6> lambda_j_min{};  // index 1..5
  std::array<double, 6> lambda_j_max{};
  double eps_min = 0, eps_max = 0;
};

PatternBounds pattern_bounds(const Pattern& c);

/// All 3^s patterns (c_{s+1}, ..., c_9, w_1, ..., w_s), w in lexicographic order.
std::vector<Pattern> shift_completions(const Pattern& c, std::size_t s);

/// All 19,683 patterns in lexicographic order.
std::vector<Pattern> enumerate_patterns();

}  // namespace sudler
