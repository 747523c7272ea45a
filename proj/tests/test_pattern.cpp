#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "sudler/pattern.hpp"

using namespace sudler;

namespace {

// alpha whose pattern at index k is c; a_{k-4}, a_{k-5}, ... cycle through
// `back`, and the digits after c_9 repeat `forward`.
ContinuedFraction with_pattern(const Pattern& c, const std::vector<int>& back,
                               const std::vector<int>& forward, std::size_t k = 40) {
  std::vector<int> pre(k - 4);
  for (std::size_t i = 0; i < k - 4; ++i) pre[k - 5 - i] = back[i % back.size()];
  for (std::size_t i = 1; i <= 9; ++i) pre.push_back(c.c(i));
  return ContinuedFraction(0, pre, forward);
}

double quadratic_31() { return (-3 + std::sqrt(21.0)) / 6; }  // [0;(3,1)]

}  // namespace

TEST_CASE("pattern text, index and enumeration") {
  const auto all = enumerate_patterns();
  CHECK(all.size() == 19683);
  CHECK(all.front().str() == "111111111");
  CHECK(all.back().str() == "333333333");
  for (std::size_t i = 0; i < all.size(); ++i) {
    REQUIRE(all[i].index() == i);
    if (i) REQUIRE(all[i - 1] < all[i]);
  }
  const auto p = Pattern::parse("123123123");
  CHECK(p.str() == "123123123");
  CHECK(p.c(1) == 1);
  CHECK(p.c(9) == 3);
  CHECK(p.left_word() == std::vector<int>{1, 3, 2, 1});
  CHECK_THROWS_AS(Pattern::parse("12312312"), std::invalid_argument);
  CHECK_THROWS_AS(Pattern::parse("123123124"), std::invalid_argument);
}

TEST_CASE("cf_min and cf_max") {
  CHECK(cf_min({}) == doctest::Approx(quadratic_31()).epsilon(1e-15));
  CHECK(cf_min({}) == doctest::Approx(0.2637626).epsilon(1e-7));
  CHECK(cf_max({}) == doctest::Approx(0.7912878).epsilon(1e-7));
  // [0;(1,3)] = 1/(1 + [0;(3,1)])
  CHECK(cf_max({}) == doctest::Approx(1.0 / (1.0 + quadratic_31())).epsilon(1e-15));
  CHECK(cf_min({2}) == doctest::Approx(1.0 / (2.0 + cf_max({}))).epsilon(1e-15));

  std::size_t count = 1;
  for (std::size_t len = 0; len <= 6; ++len) {
    for (std::size_t w = 0; w < count; ++w) {
      std::vector<int> word(len);
      std::size_t r = w;
      for (auto& d : word) {
        d = static_cast<int>(r % 3) + 1;
        r /= 3;
      }
      REQUIRE(cf_min(word) < cf_max(word));
    }
    count *= 3;
  }
}

TEST_CASE("cf_min and cf_max bracket every {1,2,3} continuation") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(1, 3);
  for (int t = 0; t < 2000; ++t) {
    std::vector<int> word(rng() % 7);
    for (int& x : word) x = d(rng);
    std::vector<int> tail(1 + rng() % 4);
    for (int& x : tail) x = d(rng);
    std::vector<int> pre = word;
    for (int i = 0; i < 5; ++i) pre.push_back(d(rng));
    const double v = ContinuedFraction(0, pre, tail).value();
    REQUIRE(v >= cf_min(word) - 1e-15);
    REQUIRE(v <= cf_max(word) + 1e-15);
  }
}

TEST_CASE("bounds for the all-ones pattern") {
  const auto b = pattern_bounds(Pattern::parse("111111111"));
  CHECK(b.vec_min == doctest::Approx(eval_cf(parse_cf("[1;1,1,1,1,(3,1)]"))).epsilon(1e-15));
  CHECK(b.vec_max == doctest::Approx(eval_cf(parse_cf("[1;1,1,1,1,(1,3)]"))).epsilon(1e-15));
  // 30-digit values of the two quadratic irrationals
  CHECK(b.vec_min == doctest::Approx(1.60910894511799619063).epsilon(1e-15));
  CHECK(b.vec_max == doctest::Approx(1.62146196069195914887).epsilon(1e-15));
  CHECK(b.vec_min < b.vec_max);
  CHECK(b.cev_min == doctest::Approx(eval_cf(parse_cf("[0;1,1,1,1,(3,1)]"))).epsilon(1e-15));
}

TEST_CASE("bounds for an explicit pattern against independent formulas") {
  const auto c = Pattern::parse("213132231");
  const auto b = pattern_bounds(c);
  const double cmin = eval_cf(parse_cf("[0;1,3,1,2,(3,1)]"));
  const double cmax = eval_cf(parse_cf("[0;1,3,1,2,(1,3)]"));
  const double vmin = eval_cf(parse_cf("[3;2,2,3,1,(3,1)]"));
  const double vmax = eval_cf(parse_cf("[3;2,2,3,1,(1,3)]"));
  CHECK(b.cev_min == doctest::Approx(cmin).epsilon(1e-15));
  CHECK(b.cev_max == doctest::Approx(cmax).epsilon(1e-15));
  CHECK(b.lambda_min == doctest::Approx(1 / (vmax + cmax)).epsilon(1e-15));
  CHECK(b.lambda_max == doctest::Approx(1 / (vmin + cmin)).epsilon(1e-15));
  // j = 2: <c5,c6> = <3,2> = 7, <c6> = 2; tails [c7; c8, c9, (1,3)] and [0; c6..c1, (1,3)]
  const double l2min = 1 / (7 + cmax * 2) /
                       (eval_cf(parse_cf("[2;3,1,(1,3)]")) + eval_cf(parse_cf("[0;2,3,1,3,1,2,(1,3)]")));
  CHECK(b.lambda_j_min[2] == doctest::Approx(l2min).epsilon(1e-14));
  // j = 5
  const double k59 = static_cast<double>(continuant({3, 2, 2, 3, 1}));
  const double k69 = static_cast<double>(continuant({2, 2, 3, 1}));
  const double l5max = 1 / (k59 + cmin * k69) /
                       (eval_cf(parse_cf("[1;(3,1)]")) + eval_cf(parse_cf("[0;1,3,2,2,3,1,3,1,2,(1,3)]")));
  CHECK(b.lambda_j_max[5] == doctest::Approx(l5max).epsilon(1e-14));
  CHECK(b.eps_min == doctest::Approx(-b.lambda_max + b.lambda_j_min[1]).epsilon(1e-15));
  CHECK(b.eps_max == doctest::Approx(2 * b.lambda_max + b.lambda_j_max[1]).epsilon(1e-15));
}

TEST_CASE("pattern bound invariants, all patterns") {
  double worst_spread = 0;
  for (const auto& c : enumerate_patterns()) {
    const auto b = pattern_bounds(c);
    REQUIRE(b.vec_min < b.vec_max);
    REQUIRE(b.cev_min < b.cev_max);
    REQUIRE(b.lambda_min < b.lambda_max);
    REQUIRE(b.lambda_min == doctest::Approx(1 / (b.vec_max + b.cev_max)).epsilon(1e-15));
    for (std::size_t j = 1; j <= 5; ++j) {
      REQUIRE(b.lambda_j_min[j] < b.lambda_j_max[j]);
      REQUIRE(b.lambda_j_min[j] > 0);
    }
    REQUIRE(b.cev_max - b.cev_min < 3.0 / 25.0);
    REQUIRE(b.eps_min > -1);
    REQUIRE(b.eps_min <= 0);
    REQUIRE(b.eps_max > 0);
    REQUIRE(b.eps_max < 1);
    REQUIRE(b.eps_min >= -b.lambda_min);
    REQUIRE(b.lambda_j_min[1] >= 1 / (4.6 * (c.c(5) + 1)));
    worst_spread = std::max(worst_spread, b.cev_max - b.cev_min);
  }
  MESSAGE("largest reversal spread " << worst_spread);
}

TEST_CASE("shift completions") {
  const auto c = Pattern::parse("123123123");
  CHECK(shift_completions(c, 0) == std::vector<Pattern>{c});
  const auto s1 = shift_completions(c, 1);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0].str() == "231231231");
  CHECK(s1[2].str() == "231231233");
  const auto s3 = shift_completions(c, 3);
  CHECK(s3.size() == 27);
  CHECK(s3[0].str() == "123123111");
  CHECK(s3[26].str() == "123123333");
  std::set<std::string> uniq;
  for (const auto& p : shift_completions(c, 5)) uniq.insert(p.str());
  CHECK(uniq.size() == 243);
  CHECK_THROWS_AS(shift_completions(c, 6), std::invalid_argument);
}

TEST_CASE("pattern_at reads a_{k-3} .. a_{k+5}") {
  const auto a = parse_cf("[0;(1,2,3)]");
  CHECK(pattern_at(a, 4).str() == "123123123");
  CHECK(pattern_at(a, 5).str() == "231231231");
  CHECK_THROWS_AS(pattern_at(a, 3), std::invalid_argument);
}

TEST_CASE("empirical quantities at k = 40 lie inside the pattern bounds") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<int> d(1, 3);
  const std::size_t k = 40;
  for (int t = 0; t < 50; ++t) {
    std::vector<int> prefix(60), period(1 + rng() % 4);
    for (int& x : prefix) x = d(rng);
    for (int& x : period) x = d(rng);
    const ContinuedFraction alpha(0, prefix, period);
    const Convergents conv(alpha, k + 6);
    const Pattern c = pattern_at(alpha, k);
    const auto b = pattern_bounds(c);
    const double tol = 1e-6;
    CHECK(conv.tail(k + 1) >= b.vec_min - tol);
    CHECK(conv.tail(k + 1) <= b.vec_max + tol);
    CHECK(conv.reversal(k) >= b.cev_min - tol);
    CHECK(conv.reversal(k) <= b.cev_max + tol);
    CHECK(conv.lambda(k) >= b.lambda_min - tol);
    CHECK(conv.lambda(k) <= b.lambda_max + tol);
    for (std::size_t j = 1; j <= 5; ++j) {
      CHECK(conv.lambda_kj(k, j) >= b.lambda_j_min[j] - tol);
      CHECK(conv.lambda_kj(k, j) <= b.lambda_j_max[j] + tol);
    }
  }
}

TEST_CASE("pattern bounds are approached by extremal expansions") {
  // The four choices of periodic continuations before and after the pattern
  // realise lambda_{k,j} extremes up to the coupling between the reversal
  // and the backward tail, which only affects odd j.
  std::mt19937_64 rng(9);
  const std::vector<std::vector<int>> tails{{3, 1}, {1, 3}};
  for (int t = 0; t < 50; ++t) {
    const Pattern c = Pattern::from_index(rng() % kPatternCount);
    const auto b = pattern_bounds(c);
    double lo[6], hi[6], vlo = 9, vhi = 0, clo = 9, chi = 0, llo = 9, lhi = 0;
    std::fill(lo, lo + 6, 9.0);
    std::fill(hi, hi + 6, 0.0);
    for (const auto& back : tails)
      for (const auto& fwd : tails) {
        const auto alpha = with_pattern(c, back, fwd);
        const Convergents conv(alpha, 46);
        vlo = std::min(vlo, conv.tail(41));
        vhi = std::max(vhi, conv.tail(41));
        clo = std::min(clo, conv.reversal(40));
        chi = std::max(chi, conv.reversal(40));
        llo = std::min(llo, conv.lambda(40));
        lhi = std::max(lhi, conv.lambda(40));
        for (std::size_t j = 1; j <= 5; ++j) {
          lo[j] = std::min(lo[j], conv.lambda_kj(40, j));
          hi[j] = std::max(hi[j], conv.lambda_kj(40, j));
        }
      }
    CHECK(std::fabs(vlo - b.vec_min) < 1e-12);
    CHECK(std::fabs(vhi - b.vec_max) < 1e-12);
    CHECK(std::fabs(clo - b.cev_min) < 1e-12);
    CHECK(std::fabs(chi - b.cev_max) < 1e-12);
    CHECK(std::fabs(llo - b.lambda_min) < 1e-12);
    CHECK(std::fabs(lhi - b.lambda_max) < 1e-12);
    for (std::size_t j = 1; j <= 5; ++j) {
      const double tol = j == 1 ? 2e-4 : 1e-4;
      CHECK(lo[j] >= b.lambda_j_min[j] - 1e-12);
      CHECK(hi[j] <= b.lambda_j_max[j] + 1e-12);
      CHECK(lo[j] - b.lambda_j_min[j] < tol);
      CHECK(b.lambda_j_max[j] - hi[j] < tol);
    }
  }
}
