#include "sudler/pattern.hpp"

#include <stdexcept>

namespace sudler {

namespace {

const std::vector<int> kPeriod31{3, 1};
const std::vector<int> kPeriod13{1, 3};

long double cont_ld(const Pattern& c, std::size_t from, std::size_t to) {
  // <c_from, ..., c_to>, empty when from > to
  std::vector<int> seq;
  for (std::size_t i = from; i <= to && i >= 1 && to >= from; ++i) seq.push_back(c.c(i));
  return static_cast<long double>(continuant(seq));
}

// [c_from; c_{from+1}, ..., c_9, period]
long double forward_cf(const Pattern& c, std::size_t from, const std::vector<int>& period) {
  std::vector<int> prefix;
  for (std::size_t i = from + 1; i <= kPatternLength; ++i) prefix.push_back(c.c(i));
  return ContinuedFraction(c.c(from), prefix, period).value_ld();
}

// [0; c_from, c_{from-1}, ..., c_1, period]
long double backward_cf(const Pattern& c, std::size_t from, const std::vector<int>& period) {
  std::vector<int> prefix;
  for (std::size_t i = from; i >= 1; --i) prefix.push_back(c.c(i));
  return ContinuedFraction(0, prefix, period).value_ld();
}

}  // namespace

Pattern::Pattern(const std::array<int, kPatternLength>& digits) : digits_(digits) {
  for (int d : digits_)
    if (d < 1 || d > 3) throw std::invalid_argument("pattern digits must be in {1,2,3}");
}

Pattern Pattern::parse(std::string_view text) {
  if (text.size() != kPatternLength)
    throw std::invalid_argument("pattern must have exactly 9 digits: '" + std::string(text) + "'");
  std::array<int, kPatternLength> d{};
  for (std::size_t i = 0; i < kPatternLength; ++i) {
    if (text[i] < '1' || text[i] > '3')
      throw std::invalid_argument("pattern digits must be in {1,2,3}: '" + std::string(text) + "'");
    d[i] = text[i] - '0';
  }
  return Pattern(d);
}

Pattern Pattern::from_index(std::size_t index) {
  if (index >= kPatternCount) throw std::out_of_range("pattern index");
  std::array<int, kPatternLength> d{};
  for (std::size_t i = kPatternLength; i-- > 0;) {
    d[i] = static_cast<int>(index % 3) + 1;
    index /= 3;
  }
  return Pattern(d);
}

std::size_t Pattern::index() const noexcept {
  std::size_t idx = 0;
  for (int d : digits_) idx = idx * 3 + static_cast<std::size_t>(d - 1);
  return idx;
}

std::string Pattern::str() const {
  std::string s(kPatternLength, '0');
  for (std::size_t i = 0; i < kPatternLength; ++i) s[i] = static_cast<char>('0' + digits_[i]);
  return s;
}

Pattern pattern_at(const ContinuedFraction& alpha, std::size_t k) {
  if (k < 4) throw std::invalid_argument("pattern index k must be >= 4");
  std::array<int, kPatternLength> d{};
  for (std::size_t i = 0; i < kPatternLength; ++i) d[i] = static_cast<int>(alpha.digit(k - 3 + i));
  return Pattern(d);
}

ContinuedFraction cf_min_expansion(std::span<const int> word) {
  return ContinuedFraction(0, {word.begin(), word.end()}, word.size() % 2 == 0 ? kPeriod31 : kPeriod13);
}

ContinuedFraction cf_max_expansion(std::span<const int> word) {
  return ContinuedFraction(0, {word.begin(), word.end()}, word.size() % 2 == 0 ? kPeriod13 : kPeriod31);
}

double cf_min(std::span<const int> word) { return cf_min_expansion(word).value(); }
double cf_max(std::span<const int> word) { return cf_max_expansion(word).value(); }

PatternBounds pattern_bounds(const Pattern& c) {
  PatternBounds b;
  const long double vmin = forward_cf(c, 5, kPeriod31);
  const long double vmax = forward_cf(c, 5, kPeriod13);
  const long double cmin = backward_cf(c, 4, kPeriod31);
  const long double cmax = backward_cf(c, 4, kPeriod13);
  b.vec_min = static_cast<double>(vmin);
  b.vec_max = static_cast<double>(vmax);
  b.cev_min = static_cast<double>(cmin);
  b.cev_max = static_cast<double>(cmax);
  const long double lmin = 1.0L / (vmax + cmax);
  const long double lmax = 1.0L / (vmin + cmin);
  b.lambda_min = static_cast<double>(lmin);
  b.lambda_max = static_cast<double>(lmax);

  for (std::size_t j = 1; j <= 4; ++j) {
    const bool odd = j % 2 == 1;
    const auto& p_lo = odd ? kPeriod31 : kPeriod13;  // tails for the minimum
    const auto& p_hi = odd ? kPeriod13 : kPeriod31;
    const long double k1 = cont_ld(c, 5, 4 + j);
    const long double k2 = cont_ld(c, 6, 4 + j);
    const long double lo = 1.0L / (k1 + cmax * k2) /
                           (forward_cf(c, 5 + j, p_lo) + backward_cf(c, 4 + j, p_lo));
    const long double hi = 1.0L / (k1 + cmin * k2) /
                           (forward_cf(c, 5 + j, p_hi) + backward_cf(c, 4 + j, p_hi));
    b.lambda_j_min[j] = static_cast<double>(lo);
    b.lambda_j_max[j] = static_cast<double>(hi);
  }
  {
    const long double k1 = cont_ld(c, 5, 9);
    const long double k2 = cont_ld(c, 6, 9);
    const long double head_min = ContinuedFraction(3, {}, kPeriod13).value_ld();
    const long double head_max = ContinuedFraction(1, {}, kPeriod31).value_ld();
    b.lambda_j_min[5] =
        static_cast<double>(1.0L / (k1 + cmax * k2) / (head_min + backward_cf(c, 9, kPeriod31)));
    b.lambda_j_max[5] =
        static_cast<double>(1.0L / (k1 + cmin * k2) / (head_max + backward_cf(c, 9, kPeriod13)));
  }
  b.eps_min = static_cast<double>(-lmax + b.lambda_j_min[1]);
  b.eps_max = static_cast<double>((c.c(5) - 1) * lmax + b.lambda_j_max[1]);
  return b;
}

std::vector<Pattern> shift_completions(const Pattern& c, std::size_t s) {
  if (s > 5) throw std::invalid_argument("shift must be in 0..5");
  std::size_t count = 1;
  for (std::size_t i = 0; i < s; ++i) count *= 3;
  std::vector<Pattern> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    std::array<int, kPatternLength> d{};
    for (std::size_t i = 0; i + s < kPatternLength; ++i) d[i] = c.c(i + s + 1);
    std::size_t rest = w;
    for (std::size_t i = kPatternLength; i-- > kPatternLength - s;) {
      d[i] = static_cast<int>(rest % 3) + 1;
      rest /= 3;
    }
    out.emplace_back(d);
  }
  return out;
}

std::vector<Pattern> enumerate_patterns() {
  std::vector<Pattern> out;
  out.reserve(kPatternCount);
  for (std::size_t i = 0; i < kPatternCount; ++i) out.push_back(Pattern::from_index(i));
  return out;
}

}  // namespace sudler
