#pragma once

// The lower-bound family F_c: the factors f_{c,n}, the tail factor f_{c,inf},
// the w_min / w_max / w_est estimators and the recursive W algorithm.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sudler/contfrac.hpp"
#include "sudler/pattern.hpp"

namespace sudler {

struct FParams {
  int n0 = 20;
  int T = 10000;
  int m = 40;

  /// Throws std::invalid_argument unless n0 >= 10, T >= n0 + 2, m >= 1.
  void validate() const;
  friend bool operator==(const FParams&, const FParams&) = default;
};

inline constexpr FParams kFullParams{20, 10000, 40};
inline constexpr FParams kSmokeParams{20, 2000, 12};

struct WMinMax {
  double w_min = 0;
  double w_max = 0;
};

/// w_min(l,x,y) and w_max(l,x,y) for x <= y; floors of n*x and n*y are exact.
WMinMax w_minmax(std::int64_t ell, const ContinuedFraction& x, const ContinuedFraction& y);
/// Same with plain floating x, y (floors taken in double precision).
WMinMax w_minmax(std::int64_t ell, double x, double y);

/// max(|sum w_min(l)/(l(l+1))|, |sum w_max(l)/(l(l+1))|) over l = n0+1..T, in O(T).
double w_est(const FParams& params, const ContinuedFraction& x, const ContinuedFraction& y);
double w_est(const FParams& params, double x, double y);

struct WLeaf {
  std::vector<int> word;  // C, starting with c_left
  double x = 0, y = 0;    // cf_min(C), cf_max(C)
  double west = 0;
};

struct WResult {
  double W = 0;
  double err_max = 0;  // final threshold
  int restarts = 0;
  std::size_t evaluations = 0;  // calls of w_est over all attempts
  std::vector<WLeaf> leaves;    // leaves of the accepted attempt, in word order
};

/// The recursive W algorithm rooted at c_left = (c_4, c_3, c_2, c_1).
/// Every branch that reaches word length m without meeting the threshold
/// restarts the whole run with err_max * 1.05. Throws std::runtime_error
/// after 10,000 restarts.
WResult W_algorithm(std::span<const int> c_left, const FParams& params);
inline WResult W_algorithm(const Pattern& c, const FParams& params) {
  const auto left = c.left_word();
  return W_algorithm(std::span<const int>(left), params);
}

/// 81 possible roots; index of c_left = (c_4, c_3, c_2, c_1) in base 3.
constexpr std::size_t kLeftWordCount = 81;
std::size_t left_word_index(const Pattern& c);
std::vector<int> left_word_from_index(std::size_t index);

class FFunction {
 public:
  /// Grid slack allowed outside [eps_min, eps_max] when evaluating.
  static constexpr double kDomainSlack = 1e-3;

  FFunction(const Pattern& c, const FParams& params, double W, int restarts = 0);

  const Pattern& pattern() const noexcept { return pattern_; }
  const PatternBounds& bounds() const noexcept { return bounds_; }
  const FParams& params() const noexcept { return params_; }
  double W() const noexcept { return W_; }
  int restarts() const noexcept { return restarts_; }

  /// g_{c,n}, n = 1..n0.
  double g(int n) const { return g_.at(static_cast<std::size_t>(n)); }
  double e(int n, double eps) const;
  double f_n(int n, double eps) const { return g(n) - e(n, eps); }
  double E(double eps) const;
  double f_inf(double eps) const;

  double domain_lo() const noexcept { return bounds_.eps_min - kDomainSlack; }
  double domain_hi() const noexcept { return bounds_.eps_max + kDomainSlack; }
  bool in_domain(double eps) const noexcept { return eps >= domain_lo() && eps <= domain_hi(); }

  /// F_c(eps); throws std::domain_error outside [eps_min - slack, eps_max + slack].
  double operator()(double eps) const;

 private:
  Pattern pattern_;
  PatternBounds bounds_;
  FParams params_;
  double W_;
  int restarts_;
  double tail_const_;     // 2 lambda_max (W + 9/2 (1 + log T)/T)
  std::vector<double> g_;  // index 1..n0
};

/// g_{c,n} from the three-way case split; floors decided exactly.
double g_cn(const Pattern& c, const PatternBounds& b, int n);

struct FTableRow {
  double epsilon;
  std::optional<double> value;  // empty outside the domain
};
std::vector<FTableRow> F_table(const FFunction& f, std::span<const double> grid);

}  // namespace sudler
