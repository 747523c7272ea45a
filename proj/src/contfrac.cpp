#include "sudler/contfrac.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sudler {

std::string to_string(Integer value) {
  if (value == 0) return "0";
  bool neg = value < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(value + 1)) + 1
                            : static_cast<unsigned __int128>(value);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

Integer checked_mul_add(Integer a, Integer b, Integer c) {
  Integer prod;
  Integer sum;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum))
    throw std::overflow_error("continuant overflows 128-bit integer");
  return sum;
}

void require_positive(const std::vector<int>& digits, const char* what) {
  for (int d : digits)
    if (d < 1) throw std::invalid_argument(std::string(what) + " digits must be >= 1");
}

// Smallest block whose repetition yields the period.
std::vector<int> primitive_period(const std::vector<int>& period) {
  const std::size_t n = period.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool ok = true;
    for (std::size_t i = len; i < n && ok; ++i) ok = period[i] == period[i - len];
    if (ok) return {period.begin(), period.begin() + static_cast<std::ptrdiff_t>(len)};
  }
  return period;
}

// Value of the purely periodic [t1; t2, ..., tk, t1, ...] (> 1).
long double periodic_value(const std::vector<int>& period) {
  // M = [[p, p'], [q, q']] after the block; y = (p y + p') / (q y + q').
  Integer p = 1, pp = 0, q = 0, qp = 1;
  for (int t : period) {
    Integer np = checked_mul_add(t, p, pp);
    Integer nq = checked_mul_add(t, q, qp);
    pp = p;
    qp = q;
    p = np;
    q = nq;
  }
  // q y^2 + (q' - p) y - p' = 0
  const Integer b = qp - p;
  const Integer disc = b * b + 4 * q * pp;
  const long double root = std::sqrt(static_cast<long double>(disc));
  return (static_cast<long double>(-b) + root) / (2.0L * static_cast<long double>(q));
}

}  // namespace

ContinuedFraction::ContinuedFraction(std::int64_t a0, std::vector<int> prefix,
                                     std::vector<int> period)
    : a0_(a0), prefix_(std::move(prefix)), period_(std::move(period)) {
  if (a0_ < 0) throw std::invalid_argument("a0 must be >= 0");
  require_positive(prefix_, "prefix");
  require_positive(period_, "period");
  period_ = primitive_period(period_);
}

ContinuedFraction ContinuedFraction::from_rational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("denominator must be positive");
  if (num < 0) throw std::invalid_argument("negative rationals are not supported");
  std::int64_t a0 = num / den;
  std::int64_t r = num % den;
  std::int64_t d = den;
  std::vector<int> digits;
  while (r != 0) {
    std::int64_t nd = r;
    std::int64_t q = d / r;
    r = d % r;
    d = nd;
    digits.push_back(static_cast<int>(q));
  }
  return ContinuedFraction(a0, std::move(digits), {});
}

std::int64_t ContinuedFraction::digit(std::size_t i) const {
  if (i == 0) return a0_;
  if (i <= prefix_.size()) return prefix_[i - 1];
  if (period_.empty()) throw std::out_of_range("digit index past the end of a rational CF");
  return period_[(i - 1 - prefix_.size()) % period_.size()];
}

int ContinuedFraction::max_digit() const noexcept {
  int m = 0;
  for (int d : prefix_) m = std::max(m, d);
  for (int d : period_) m = std::max(m, d);
  return m;
}

ContinuedFraction ContinuedFraction::tail(std::size_t k) const {
  if (k == 0) return *this;
  if (k <= prefix_.size())
    return ContinuedFraction(prefix_[k - 1],
                             {prefix_.begin() + static_cast<std::ptrdiff_t>(k), prefix_.end()},
                             period_);
  if (period_.empty()) throw std::out_of_range("tail index past the end of a rational CF");
  const std::size_t j = (k - 1 - prefix_.size()) % period_.size();
  std::vector<int> rot(period_.size());
  for (std::size_t i = 0; i < rot.size(); ++i) rot[i] = period_[(j + 1 + i) % period_.size()];
  return ContinuedFraction(period_[j], {}, std::move(rot));
}

long double ContinuedFraction::value_ld() const {
  long double x;
  std::size_t i = prefix_.size();
  if (!period_.empty()) {
    x = periodic_value(period_);
  } else {
    if (prefix_.empty()) return static_cast<long double>(a0_);
    x = prefix_[--i];
  }
  while (i > 0) x = prefix_[--i] + 1.0L / x;
  return static_cast<long double>(a0_) + 1.0L / x;
}

double ContinuedFraction::value() const { return static_cast<double>(value_ld()); }

double eval_cf(const ContinuedFraction& cf) { return cf.value(); }

ContinuedFraction parse_cf(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  };
  auto number = [&]() -> std::int64_t {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') throw ParseError("negative digit", pos);
    std::int64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (v > (INT32_MAX - 9) / 10) throw ParseError("digit too large", start);
      v = v * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == start) throw ParseError("expected a number", pos);
    return v;
  };
  auto peek = [&]() -> char {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  };

  expect('[');
  const std::int64_t a0 = number();
  std::vector<int> prefix;
  std::vector<int> period;
  if (peek() == ';') {
    ++pos;
    bool in_period = false;
    bool closed_period = false;
    while (true) {
      char c = peek();
      if (c == '(') {
        if (in_period || closed_period) throw ParseError("nested or repeated period", pos);
        in_period = true;
        ++pos;
        c = peek();
      }
      const std::size_t at = pos;
      const std::int64_t d = number();
      if (d == 0) throw ParseError("zero digit", at);
      (in_period ? period : prefix).push_back(static_cast<int>(d));
      c = peek();
      if (c == ')') {
        if (!in_period) throw ParseError("unbalanced ')'", pos);
        ++pos;
        in_period = false;
        closed_period = true;
        c = peek();
      }
      if (c == ',') {
        if (closed_period) throw ParseError("digits after the period", pos);
        ++pos;
        continue;
      }
      if (c == ']') {
        if (in_period) throw ParseError("unterminated period", pos);
        break;
      }
      throw ParseError("unexpected character", pos);
    }
  }
  expect(']');
  skip_ws();
  if (pos != text.size()) throw ParseError("trailing characters", pos);
  return ContinuedFraction(a0, std::move(prefix), std::move(period));
}

std::string format_cf(const ContinuedFraction& cf) {
  std::ostringstream os;
  os << '[' << cf.a0();
  if (!cf.prefix().empty() || !cf.period().empty()) {
    os << ';';
    bool first = true;
    for (int d : cf.prefix()) {
      if (!first) os << ',';
      os << d;
      first = false;
    }
    if (!cf.period().empty()) {
      if (!first) os << ',';
      os << '(';
      for (std::size_t i = 0; i < cf.period().size(); ++i) {
        if (i) os << ',';
        os << cf.period()[i];
      }
      os << ')';
    }
  }
  os << ']';
  return os.str();
}

Integer continuant(std::span<const int> seq) {
  Integer prev = 0;  // <c_1..c_{-1}>
  Integer cur = 1;   // <>
  for (int c : seq) {
    if (c < 1) throw std::invalid_argument("continuant digits must be >= 1");
    Integer next = checked_mul_add(c, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

int compare_with_rational(const ContinuedFraction& x, std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("denominator must be positive");
  if (x.is_rational()) {
    Integer p = 1, pp = 0, q = 0, qp = 1;
    for (std::size_t i = 0; i <= x.finite_length(); ++i) {
      const Integer d = x.digit(i);
      Integer np = checked_mul_add(d, p, pp);
      Integer nq = checked_mul_add(d, q, qp);
      pp = p;
      qp = q;
      p = np;
      q = nq;
    }
    const Integer lhs = p * den;
    const Integer rhs = static_cast<Integer>(num) * q;
    return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
  }
  // Walk the digits of num/den (Euclid) alongside those of x.
  Integer n = num, d = den;
  // floor division for negative num
  for (std::size_t i = 0;; ++i) {
    Integer r = n / d;
    Integer rem = n % d;
    if (rem < 0) {
      r -= 1;
      rem += d;
    }
    const Integer xi = x.digit(i);
    const int parity = (i % 2 == 0) ? 1 : -1;
    if (xi != r) return (xi > r ? 1 : -1) * parity;
    if (rem == 0) return parity;  // x keeps going past a terminated rational
    n = d;
    d = rem;
  }
}

MultiplesOf::MultiplesOf(ContinuedFraction x) : x_(std::move(x)), value_(x_.value_ld()) {
  if (x_.is_rational()) {
    Integer p = 1, pp = 0, q = 0, qp = 1;
    for (std::size_t i = 0; i <= x_.finite_length(); ++i) {
      const Integer d = x_.digit(i);
      Integer np = checked_mul_add(d, p, pp);
      Integer nq = checked_mul_add(d, q, qp);
      pp = p;
      qp = q;
      p = np;
      q = nq;
    }
    if (q > INT64_MAX / 4 || p > INT64_MAX / 4)
      throw std::overflow_error("rational too large for exact multiples");
    exact_rational_ = true;
    num_ = static_cast<std::int64_t>(p);
    den_ = static_cast<std::int64_t>(q);
  }
}

FloorFrac MultiplesOf::at(std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("multiple index must be >= 0");
  if (exact_rational_) {
    const Integer prod = static_cast<Integer>(n) * num_;
    const Integer fl = prod / den_;
    const Integer rem = prod % den_;
    return {static_cast<std::int64_t>(fl),
            static_cast<double>(static_cast<long double>(rem) / static_cast<long double>(den_))};
  }
  const long double v = static_cast<long double>(n) * value_;
  const long double fl = std::floor(v);
  const long double frac = v - fl;
  if (frac > 1e-9L && frac < 1.0L - 1e-9L)
    return {static_cast<std::int64_t>(fl), static_cast<double>(frac)};
  // Close to an integer m: decide the side exactly.
  const std::int64_t m = static_cast<std::int64_t>(std::llround(v));
  const long double gap = std::fabs(v - static_cast<long double>(m));
  if (n == 0) return {0, 0.0};
  if (compare_with_rational(x_, m, n) > 0) return {m, static_cast<double>(gap)};
  return {m - 1, static_cast<double>(1.0L - gap)};
}

Convergents::Convergents(const ContinuedFraction& alpha, std::size_t up_to) : alpha_(alpha) {
  if (alpha.is_rational() && up_to > alpha.finite_length())
    throw std::out_of_range("convergent index beyond the digits of a rational CF");
  pairs_.reserve(up_to + 1);
  tails_.assign(up_to + 2, 0.0L);
  dist_.assign(up_to + 1, 0.0L);

  const std::size_t n_fin = alpha.is_rational() ? alpha.finite_length() : SIZE_MAX;
  for (std::size_t k = 1; k <= up_to + 1; ++k) {
    if (k > n_fin) {
      tails_[k] = INFINITY;
    } else {
      tails_[k] = alpha.tail(k).value_ld();
    }
  }
  long double prod = 1.0L;
  for (std::size_t k = 0; k <= up_to; ++k) {
    prod /= tails_[k + 1];
    dist_[k] = prod;
  }

  Integer p_prev = 1, q_prev = 0;
  Integer p = alpha.a0(), q = 1;
  for (std::size_t k = 0; k <= up_to; ++k) {
    if (k > 0) {
      const Integer a = alpha.digit(k);
      Integer np = checked_mul_add(a, p, p_prev);
      Integer nq = checked_mul_add(a, q, q_prev);
      p_prev = p;
      q_prev = q;
      p = np;
      q = nq;
    }
    long double delta = dist_[k];
    if (k == 0) delta = std::min(dist_[0], 1.0L - dist_[0]);
    pairs_.push_back({k, p, q, static_cast<double>(delta),
                      static_cast<double>(static_cast<long double>(q) * delta)});
  }
}

double Convergents::tail(std::size_t k) const {
  if (k == 0 || k >= tails_.size()) throw std::out_of_range("tail index");
  return static_cast<double>(tails_[k]);
}

double Convergents::reversal(std::size_t k) const {
  if (k == 0 || k >= pairs_.size()) throw std::out_of_range("reversal index");
  return static_cast<double>(static_cast<long double>(pairs_[k - 1].q) /
                             static_cast<long double>(pairs_[k].q));
}

double Convergents::lambda_kj(std::size_t k, std::size_t j) const {
  if (k + j >= pairs_.size()) throw std::out_of_range("lambda_{k,j} index");
  const long double d = (k + j == 0) ? pairs_[0].delta : dist_[k + j];
  return static_cast<double>(static_cast<long double>(pairs_[k].q) * d);
}

OstrowskiExpansion ostrowski_expand(std::int64_t n, const ContinuedFraction& alpha) {
  if (n < 0) throw std::invalid_argument("Ostrowski expansion needs N >= 0");
  std::vector<Integer> qs{1};
  Integer q_prev = 0, q = 1;
  for (std::size_t k = 1;; ++k) {
    if (!alpha.has_digit(k)) {
      if (q <= n) throw std::out_of_range("N must be below the denominator of a rational alpha");
      break;
    }
    Integer nq = checked_mul_add(alpha.digit(k), q, q_prev);
    if (nq > n) break;
    q_prev = q;
    q = nq;
    qs.push_back(q);
  }
  OstrowskiExpansion out{std::vector<std::int64_t>(qs.size(), 0), alpha};
  Integer rem = n;
  for (std::size_t l = qs.size(); l-- > 0;) {
    out.digits[l] = static_cast<std::int64_t>(rem / qs[l]);
    rem -= out.digits[l] * qs[l];
  }
  while (out.digits.size() > 1 && out.digits.back() == 0) out.digits.pop_back();
  return out;
}

bool is_legal_ostrowski(std::span<const std::int64_t> digits, const ContinuedFraction& alpha) {
  for (std::size_t l = 0; l < digits.size(); ++l) {
    const std::int64_t b = digits[l];
    if (b < 0) return false;
    if (!alpha.has_digit(l + 1)) {
      if (b != 0) return false;
      continue;
    }
    const std::int64_t a = alpha.digit(l + 1);
    if (l == 0) {
      if (b >= a) return false;
      continue;
    }
    if (b > a) return false;
    if (b == a && digits[l - 1] != 0) return false;
  }
  return true;
}

Integer ostrowski_value(const OstrowskiExpansion& expansion) {
  Integer total = 0;
  Integer q_prev = 0, q = 1;
  for (std::size_t l = 0; l < expansion.digits.size(); ++l) {
    if (l > 0) {
      Integer nq = checked_mul_add(expansion.alpha.digit(l), q, q_prev);
      q_prev = q;
      q = nq;
    }
    total += expansion.digits[l] * q;
  }
  return total;
}

}  // namespace sudler
