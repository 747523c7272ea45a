#pragma once

// Continued fractions: eventually periodic expansions, continuants,
// convergents with their approximation quantities, and Ostrowski numeration.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sudler {

/// Exact integer type for continuants, convergent numerators/denominators.
using Integer = __int128;

std::string to_string(Integer value);

/// Thrown by the CF text parser; carries the offending character offset.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A real number written as [a0; p1, ..., pr, (t1, ..., tk)].
///
/// An empty period denotes a rational number with finite expansion.
/// The period is stored in primitive form: (1,3,1,3) becomes (1,3).
class ContinuedFraction {
 public:
  ContinuedFraction(std::int64_t a0, std::vector<int> prefix, std::vector<int> period);

  static ContinuedFraction purely_periodic(std::vector<int> period) {
    return ContinuedFraction(0, {}, std::move(period));
  }
  /// Finite expansion of num/den, den > 0.
  static ContinuedFraction from_rational(std::int64_t num, std::int64_t den);

  std::int64_t a0() const noexcept { return a0_; }
  const std::vector<int>& prefix() const noexcept { return prefix_; }
  const std::vector<int>& period() const noexcept { return period_; }
  bool is_rational() const noexcept { return period_.empty(); }

  /// Number of partial quotients a_1, a_2, ... (only meaningful for rationals).
  std::size_t finite_length() const noexcept { return prefix_.size(); }

  /// a_i; a_0 for i == 0. Throws std::out_of_range past the end of a rational.
  std::int64_t digit(std::size_t i) const;
  bool has_digit(std::size_t i) const noexcept {
    return i == 0 || !is_rational() || i <= prefix_.size();
  }

  /// Largest partial quotient a_i (i >= 1).
  int max_digit() const noexcept;

  /// The tail [a_k; a_{k+1}, ...] as a continued fraction of its own (k >= 1).
  ContinuedFraction tail(std::size_t k) const;

  double value() const;
  long double value_ld() const;

  friend bool operator==(const ContinuedFraction&, const ContinuedFraction&) = default;

 private:
  std::int64_t a0_;
  std::vector<int> prefix_;
  std::vector<int> period_;
};

/// Value of the continued fraction; periodic tails are resolved through
/// the closed-form root of their quadratic equation.
double eval_cf(const ContinuedFraction& cf);

/// Text form "[a0;p1,p2,(t1,t2)]"; parentheses mark the period.
ContinuedFraction parse_cf(std::string_view text);
std::string format_cf(const ContinuedFraction& cf);

/// Continuant <c_1, ..., c_t>; <> = 1.
Integer continuant(std::span<const int> seq);
inline Integer continuant(std::initializer_list<int> seq) {
  return continuant(std::span<const int>(seq.begin(), seq.size()));
}

/// Sign of x - num/den, decided exactly from the digits of x (den > 0).
int compare_with_rational(const ContinuedFraction& x, std::int64_t num, std::int64_t den);

/// Exact floor(n * x) for n >= 0, with the fractional part in double precision.
struct FloorFrac {
  std::int64_t floor;
  double frac;
};

class MultiplesOf {
 public:
  explicit MultiplesOf(ContinuedFraction x);
  FloorFrac at(std::int64_t n) const;
  const ContinuedFraction& cf() const noexcept { return x_; }
  double value() const noexcept { return value_; }

 private:
  ContinuedFraction x_;
  long double value_;
  bool exact_rational_ = false;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct ConvergentPair {
  std::size_t k;
  Integer p;
  Integer q;
  double delta;   // ||q_k alpha||
  double lambda;  // q_k delta_k
};

/// Convergents p_k/q_k for k = 0..up_to together with the tails alpha_k,
/// the reversals [0; a_k, ..., a_1] and lambda_{k,j} = q_k delta_{k+j}.
class Convergents {
 public:
  Convergents(const ContinuedFraction& alpha, std::size_t up_to);

  std::size_t size() const noexcept { return pairs_.size(); }
  const ConvergentPair& operator[](std::size_t k) const { return pairs_.at(k); }
  const std::vector<ConvergentPair>& pairs() const noexcept { return pairs_; }

  Integer p(std::size_t k) const { return pairs_.at(k).p; }
  Integer q(std::size_t k) const { return pairs_.at(k).q; }
  double q_real(std::size_t k) const { return static_cast<double>(pairs_.at(k).q); }
  double delta(std::size_t k) const { return pairs_.at(k).delta; }
  double lambda(std::size_t k) const { return pairs_.at(k).lambda; }
  std::int64_t a(std::size_t k) const { return alpha_.digit(k); }

  /// alpha_k = [a_k; a_{k+1}, ...], k >= 1.
  double tail(std::size_t k) const;
  /// [0; a_k, a_{k-1}, ..., a_1] = q_{k-1}/q_k, k >= 1.
  double reversal(std::size_t k) const;
  /// lambda_{k,j} = q_k delta_{k+j}.
  double lambda_kj(std::size_t k, std::size_t j) const;
  /// |q_k alpha - p_k| = prod_{i=1}^{k+1} 1/alpha_i (equals delta_k for k >= 1).
  long double signed_free_delta(std::size_t k) const { return dist_.at(k); }

  const ContinuedFraction& alpha() const noexcept { return alpha_; }

 private:
  ContinuedFraction alpha_;
  std::vector<ConvergentPair> pairs_;
  std::vector<long double> tails_;  // tails_[k] = alpha_k, index 0 unused
  std::vector<long double> dist_;
};

inline std::vector<ConvergentPair> convergents(const ContinuedFraction& cf, std::size_t up_to) {
  return Convergents(cf, up_to).pairs();
}

/// Digits b_0..b_n of N = sum b_l q_l.
struct OstrowskiExpansion {
  std::vector<std::int64_t> digits;
  ContinuedFraction alpha;

  std::size_t top_level() const { return digits.empty() ? 0 : digits.size() - 1; }
  std::int64_t digit(std::size_t l) const { return l < digits.size() ? digits[l] : 0; }
};

OstrowskiExpansion ostrowski_expand(std::int64_t n, const ContinuedFraction& alpha);

/// Checks the digit bounds and the b_{l-1} = 0 rule against alpha.
bool is_legal_ostrowski(std::span<const std::int64_t> digits, const ContinuedFraction& alpha);

/// sum b_l q_l.
Integer ostrowski_value(const OstrowskiExpansion& expansion);

}  // namespace sudler
