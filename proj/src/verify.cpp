#include "sudler/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace sudler {

namespace {

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  unsigned threads = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << x;
  return os.str();
}

}  // namespace

// ---- grid ---------------------------------------------------------------

int grid_index_below(double x) {
  int i = static_cast<int>(std::floor(x * 1000.0 + 1000.0));
  while (i < kGridSize - 1 && grid_point(i + 1) <= x) ++i;
  while (i > 0 && grid_point(i) > x) --i;
  return std::clamp(i, 0, kGridSize - 1);
}

int grid_index_above(double x) {
  int i = static_cast<int>(std::ceil(x * 1000.0 + 1000.0));
  while (i > 0 && grid_point(i - 1) >= x) --i;
  while (i < kGridSize - 1 && grid_point(i) < x) ++i;
  return std::clamp(i, 0, kGridSize - 1);
}

GridValues grid_values(const FFunction& ff) {
  GridValues g;
  g.first = grid_index_above(ff.domain_lo());
  for (int i = g.first; i < kGridSize && ff.in_domain(grid_point(i)); ++i)
    g.values.push_back(ff(grid_point(i)));
  return g;
}

UnimodalResult check_unimodal(std::span<const double> values, int first) {
  if (values.size() < 3) throw std::invalid_argument("unimodality needs >= 3 grid values");
  UnimodalResult r;
  const auto top = std::max_element(values.begin(), values.end());
  const std::size_t m = static_cast<std::size_t>(top - values.begin());
  r.argmax = first + static_cast<int>(m);
  r.plateau = static_cast<int>(std::count(values.begin(), values.end(), *top));
  bool ok = grid_point(r.argmax) > 0;
  for (std::size_t j = 1; j <= m; ++j) ok = ok && values[j] >= values[j - 1];
  for (std::size_t j = m + 1; j < values.size(); ++j) ok = ok && values[j] <= values[j - 1];
  // the maximal points must be adjacent
  if (r.plateau > 1) ok = ok && values[m + static_cast<std::size_t>(r.plateau) - 1] == *top;
  r.ok = ok && r.plateau <= 2;
  return r;
}

double interval_lower_bound(const FFunction& ff, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("interval_lower_bound needs lo <= hi");
  const auto& b = ff.bounds();
  const double l = std::max(lo, b.eps_min), h = std::min(hi, b.eps_max);
  if (l > h)
    throw std::domain_error("interval [" + fmt(lo) + ", " + fmt(hi) + "] misses the domain of " +
                            ff.pattern().str());
  const double xl = grid_point(grid_index_below(l));
  const double xh = grid_point(grid_index_above(h));
  return std::min(ff(xl), ff(xh));
}

// ---- W table and family ---------------------------------------------------

WTable compute_w_table(const FParams& params, int jobs,
                       const std::function<std::optional<WEntry>(std::size_t)>& lookup,
                       std::vector<std::size_t>* computed) {
  params.validate();
  WTable table{};
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < kLeftWordCount; ++i) {
    std::optional<WEntry> hit;
    if (lookup) hit = lookup(i);
    if (hit)
      table[i] = *hit;
    else
      todo.push_back(i);
  }
  parallel_for(todo.size(), jobs, [&](std::size_t j) {
    const auto word = left_word_from_index(todo[j]);
    const WResult r = W_algorithm(std::span<const int>(word), params);
    table[todo[j]] = {r.W, r.restarts};
  });
  if (computed) *computed = todo;
  return table;
}

FamilyTable::FamilyTable(const FParams& params, const WTable& w, int jobs)
    : params_(params), w_(w) {
  std::vector<std::optional<FFunction>> tmp(kPatternCount);
  parallel_for(kPatternCount, jobs, [&](std::size_t i) {
    const Pattern c = Pattern::from_index(i);
    const WEntry& e = w_[left_word_index(c)];
    tmp[i].emplace(c, params_, e.W, e.restarts);
  });
  all_.reserve(kPatternCount);
  for (auto& f : tmp) all_.push_back(std::move(*f));
}

// ---- case table -----------------------------------------------------------

namespace {

DigitCondition eq(int level, int v) { return {level, v, v}; }
DigitCondition ge(int level, int v) { return {level, v, 3}; }

FactorSpec base(Chain lower, Chain upper = {}) {
  return {FactorKind::Interval, 0, 0, std::move(lower), std::move(upper), 1.0};
}
FactorSpec shifted(int s, Chain lower, Chain upper = {}, int t = 0) {
  return {FactorKind::Interval, s, t, std::move(lower), std::move(upper), 1.0};
}
FactorSpec universal(FactorKind k, int s, Coefficient power = 1.0) {
  return {k, s, k == FactorKind::UniversalT1 ? 1 : 0, {}, {}, power};
}

std::vector<CaseSpec> build_table() {
  using enum FactorKind;
  const auto T0 = UniversalT0;
  std::vector<CaseSpec> t;
  auto add = [&](std::string id, std::vector<DigitCondition> d, std::vector<FactorSpec> f,
                 std::vector<std::vector<int>> comb, double target, Parity par = Parity::Any) {
    t.push_back({std::move(id), std::move(d), par, std::move(f), std::move(comb), target, {}});
  };
  const std::vector<std::vector<int>> prod01{{0, 1}}, alone_or01{{0}, {0, 1}};

  // b_{k+1} = 1, b_{k+2} = 0
  add("1.1.1.1", {eq(1, 1), eq(2, 0), ge(3, 1)},
      {base({{-1, 1}, {-1, 2}}), shifted(1, {{1, 4}}, {{1, 2}})}, prod01, 1.061);
  add("1.1.1.2", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 0)},
      {base({{-1, 1}, {-1, 4}}), shifted(1, {{-1, 5}}, {{1, 4}})}, prod01, 1.2007);
  add("1.1.1.3", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 1), eq(5, 0), ge(6, 1)},
      {base({{-1, 1}, {1, 4}}), shifted(1, {{-1, 4}, {-1, 5}})}, prod01, 1.0301);
  add("1.1.1.4", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 1), eq(5, 0), eq(6, 0)},
      {base({{-1, 1}, {0.5, 4}}), shifted(1, {{-1, 4}, {-0.5, 5}})}, prod01, 1.1424);
  add("1.1.1.5", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 1), ge(5, 1)},
      {base({{-1, 1}, {1, 5}}), shifted(1, {{-1, 4}})}, prod01, 1.1945);
  add("1.1.1.6", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 2)},
      {base({{-1, 1}, {1, 4}, {1, 5}}), shifted(1, {{-1, 3}, {Coefficient(-2, 'a', 5, 1), 4}})},
      prod01, 1.0183);
  add("1.1.1.7", {eq(1, 1), eq(2, 0), eq(3, 0), eq(4, 3)},
      {base({{-1, 1}, {2, 4}, {1, 5}}), shifted(1, {{-1, 3}})}, prod01, 1.0189);

  // b_{k+1} = 1, b_{k+2} = 1
  add("1.1.2.1", {eq(1, 1), eq(2, 1), eq(3, 0), eq(4, 0), eq(5, 0)},
      {base({{-1, 1}, {1, 2}, {-0.5, 4}}), shifted(1, {{-1, 2}, {-1, 5}})}, alone_or01, 1.0046);
  add("1.1.2.2", {eq(1, 1), eq(2, 1), eq(3, 0), eq(4, 0), ge(5, 1)},
      {base({{-1, 1}, {1, 2}, {-1, 4}}), shifted(1, {{-1, 2}})}, alone_or01, 1.071);
  add("1.1.2.3", {eq(1, 1), eq(2, 1), eq(3, 0), ge(4, 1)},
      {base({{-1, 1}, {1, 2}, {Coefficient(-1, 'b', 4, 1), 4}, {1, 5}}),
       shifted(1, {{-1, 2}, {Coefficient(0, 'b', 4, -1), 4}, {-1, 5}}), universal(T0, 2)},
      {{0}, {0, 1, 2}}, 1.02901);
  // printed with b_{k+4} = 1 in both chains
  t.back().printed = t.back().factors;
  t.back().printed[0].lower = {{-1, 1}, {1, 2}, {1, 5}};
  t.back().printed[1].lower = {{-1, 2}, {-1, 4}, {-1, 5}};
  add("1.1.2.4", {eq(1, 1), eq(2, 1), ge(3, 1)},
      {base({{-1, 1}, {1, 3}}), shifted(1, {{-1, 2}, {1, 4}})}, alone_or01, 1.0705);

  // b_{k+1} = 1, b_{k+2} = 2
  add("1.1.3.1", {eq(1, 1), eq(2, 2), eq(3, 0), eq(4, 0), eq(5, 0), eq(6, 0)},
      {base({{-1, 1}, {2, 2}, {-0.5, 4}}), shifted(1, {{-2, 2}, {-0.5, 5}})}, alone_or01, 1.03587);
  add("1.1.3.2", {eq(1, 1), eq(2, 2), eq(3, 0), eq(4, 0), eq(5, 0), ge(6, 1)},
      {base({{-1, 1}, {2, 2}}), shifted(1, {{-2, 2}, {-1, 5}})}, alone_or01, 1.0139);
  add("1.1.3.3", {eq(1, 1), eq(2, 2), eq(3, 0), eq(4, 0), ge(5, 1)},
      {base({{-1, 1}, {2, 2}, {-1, 4}}), shifted(1, {{-2, 2}})}, alone_or01, 1.0466);
  add("1.1.3.4", {eq(1, 1), eq(2, 2), eq(3, 0), eq(4, 1), eq(5, 0)},
      {base({{-1, 1}, {2, 2}, {0.5, 4}}), shifted(1, {{-2, 2}, {-1, 4}, {-1, 5}})}, alone_or01,
      1.0032);
  add("1.1.3.5", {eq(1, 1), eq(2, 2), eq(3, 0), eq(4, 1), ge(5, 1)},
      {base({{-1, 1}, {2, 2}, {1, 5}}), shifted(1, {{-2, 2}, {-1, 4}})}, alone_or01, 1.0084);
  add("1.1.3.6", {eq(1, 1), eq(2, 2), eq(3, 0), ge(4, 2)},
      {base({{-1, 1}, {2, 2}, {1, 4}, {1, 5}})}, {{0}}, 1.0179);
  add("1.1.3.7", {eq(1, 1), eq(2, 2), ge(3, 1)},
      {base({{-1, 1}, {1, 2}, {1, 3}}), shifted(1, {{-2, 2}, {1, 4}})}, alone_or01, 1.0325);

  add("1.2", {eq(1, 2)}, {base({{-2, 1}, {-1, 2}}), universal(UniversalT1, 1)}, prod01, 1.53477);
  // printed with the lambdas of c_{k+1}
  t.back().printed = {base({{-2, 2}, {-1, 3}}), universal(UniversalT1, 1)};
  t.back().printed[0].lambda_shift = 1;

  add("2.1", {eq(1, 0), ge(2, 1)}, {universal(T0, 0)}, {{0}}, 1.14671);

  // b_{k+1} = b_{k+2} = b_{k+3} = 0
  add("2.2.1.1", {eq(1, 0), eq(2, 0), eq(3, 0), eq(4, 0), eq(5, 0)},
      {base({{-0.5, 4}}, {{1, 5}})}, {{0}}, 1.0841);
  add("2.2.1.2", {eq(1, 0), eq(2, 0), eq(3, 0), eq(4, 0), ge(5, 1)},
      {base({{-1, 4}}), universal(T0, 5)}, prod01, 1.1296, Parity::Odd);
  add("2.2.1.3", {eq(1, 0), eq(2, 0), eq(3, 0), eq(4, 0), ge(5, 1)},
      {base({{Coefficient(0, 'b', 5, -1), 5}}), universal(T0, 5, Coefficient(-1, 'b', 5, 1))},
      prod01, 1.0596, Parity::Even);
  add("2.2.1.4", {eq(1, 0), eq(2, 0), eq(3, 0), ge(4, 1)}, {universal(T0, 0)}, {{0}}, 1.14671);

  // b_{k+3} = 1, b_{k+4} = 0
  add("2.2.2.1", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 0), eq(5, 0)},
      {base({{-1, 3}, {-0.5, 4}}), shifted(3, {}, {{1, 6}})}, prod01, 1.432, Parity::Odd);
  add("2.2.2.2", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 0), eq(5, 0)},
      {base({{-1, 3}}), shifted(3, {{-1, 5}})}, alone_or01, 1.0535, Parity::Even);
  add("2.2.2.3", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 0), ge(5, 1)},
      {base({{-1, 3}, {-1, 4}}), shifted(3, {{1, 6}}, {{1, 4}})}, prod01, 1.434);

  // b_{k+3} = 1, b_{k+4} >= 1
  add("2.2.3.1", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 1), eq(5, 0), eq(6, 0)},
      {base({{-1, 3}, {0.5, 4}}), shifted(3, {{-1, 4}, {-0.5, 5}})}, alone_or01, 1.073);
  add("2.2.3.2", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 1), eq(5, 0), ge(6, 1)},
      {base({{-1, 3}, {1, 4}}), shifted(3, {{-1, 4}, {-1, 5}})}, alone_or01, 1.063);
  add("2.2.3.3", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 1), ge(5, 1)},
      {base({{-1, 3}, {1, 5}}), shifted(3, {{-1, 4}, {1, 6}})}, alone_or01, 1.0622);
  add("2.2.3.4", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 2), eq(5, 0), eq(6, 0)},
      {base({{-1, 3}, {1.5, 4}}), shifted(3, {{-2, 4}, {-0.5, 5}})}, alone_or01, 1.0659);
  t.back().printed = {base({{-1, 3}, {1.5, 4}}), shifted(3, {{-2, 4}, {0.5, 5}})};
  add("2.2.3.5", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 2), eq(5, 0), ge(6, 1)},
      {base({{-1, 3}, {2, 4}})}, {{0}}, 1.0262);
  add("2.2.3.6", {eq(1, 0), eq(2, 0), eq(3, 1), eq(4, 2), ge(5, 1)},
      {base({{-1, 3}, {1, 4}, {1, 5}}), shifted(3, {{-2, 4}, {1, 6}})}, alone_or01, 1.0522);

  add("2.2.4", {eq(1, 0), eq(2, 0), eq(3, 2)},
      {base({{-2, 3}, {-1, 4}}), shifted(3, {}, {{1, 3}, {1, 4}}, 1)}, alone_or01, 1.14807);
  add("2.2.5", {eq(1, 0), eq(2, 0), eq(3, 3)},
      {base({{-3, 3}, {-1, 4}}), shifted(3, {}, {{1, 3}, {1, 4}}, 1),
       shifted(3, {{1, 3}}, {{2, 3}, {1, 4}}, 2)},
      {{0}, {0, 1, 2}}, 1.4541);
  return t;
}

std::size_t right_word_index(const Pattern& c) {
  std::size_t idx = 0;
  for (std::size_t i = 5; i <= 9; ++i) idx = idx * 3 + static_cast<std::size_t>(c.c(i) - 1);
  return idx;
}

// a[1..5] known; a_{k+6}, a_{k+7} free in {1,2,3}
std::vector<DigitState> enumerate_states(const std::array<int, 8>& a) {
  std::set<std::pair<std::array<int, 7>, int>> seen;
  std::vector<DigitState> out;
  std::array<int, 7> b{};
  auto emit = [&](Parity p) {
    if (seen.insert({b, static_cast<int>(p)}).second) {
      DigitState s;
      s.b = b;
      s.a = a;
      s.rpar = p;
      out.push_back(s);
    }
  };
  auto rec = [&](auto&& self, int i) -> void {
    if (i == 7) {
      if (b[6] >= 1) {
        emit(Parity::Even);
      } else {
        emit(Parity::Odd);
        emit(Parity::Even);
      }
      return;
    }
    // the largest a_{k+i+1} allowed; free digits beyond the pattern may be 3
    const int cap = i + 1 <= 5 ? a[static_cast<std::size_t>(i + 1)] : 3;
    for (int v = (i == 0 ? 1 : 0); v <= cap; ++v) {
      // b_{k+i} = a_{k+i+1} forces b_{k+i-1} = 0
      if (i >= 1 && v == cap && b[static_cast<std::size_t>(i - 1)] != 0) continue;
      b[static_cast<std::size_t>(i)] = v;
      self(self, i + 1);
    }
    b[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0);
  return out;
}

const std::vector<DigitState>& states_for(const Pattern& c) {
  static const std::vector<std::vector<DigitState>> all = [] {
    std::vector<std::vector<DigitState>> v(243);
    for (std::size_t r = 0; r < 243; ++r) {
      std::array<int, 8> a{};
      std::size_t rest = r;
      for (int i = 5; i >= 1; --i) {
        a[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3) + 1;
        rest /= 3;
      }
      v[r] = enumerate_states(a);
    }
    return v;
  }();
  return all[right_word_index(c)];
}

double coef_value(const Coefficient& k, const Pattern& c, std::span<const int> b) {
  if (k.digit == 0) return k.constant;
  double x = 0;
  if (k.digit == 'a') {
    if (k.index < 1 || k.index > 5) throw std::out_of_range("a_{k+i} known for i = 1..5");
    x = c.c(static_cast<std::size_t>(4 + k.index));
  } else if (k.digit == 'b') {
    if (k.index < 0 || k.index > 6) throw std::out_of_range("b_{k+i} known for i = 0..6");
    x = b[static_cast<std::size_t>(k.index)];
  } else {
    throw std::invalid_argument("coefficient digit must be 'a' or 'b'");
  }
  return k.constant + k.scale * x;
}

void referenced_b(const FactorSpec& f, std::set<int>& out) {
  auto look = [&](const Coefficient& k) {
    if (k.digit == 'b') out.insert(k.index);
  };
  for (const auto& t : f.lower) look(t.coef);
  for (const auto& t : f.upper) look(t.coef);
  look(f.power);
}

struct FactorEval {
  double value = std::numeric_limits<double>::infinity();
  std::string where;
};

FactorEval eval_factor(const FactorSpec& f, const Pattern& c, std::span<const int> b,
                       const FamilyTable& fam, const UniversalValues& u, bool detail) {
  FactorEval out;
  if (f.kind != FactorKind::Interval) {
    const double base = f.kind == FactorKind::UniversalT0 ? u.t0 : u.t1;
    out.value = std::pow(base, coef_value(f.power, c, b));
    if (detail) out.where = "universal " + fmt(base);
    return out;
  }
  const auto comps = f.shift == 0 ? std::vector<Pattern>{c}
                                  : shift_completions(c, static_cast<std::size_t>(f.shift));
  const int ls = f.lambda_shift < 0 ? f.shift : f.lambda_shift;
  for (const Pattern& cp : comps) {
    const FFunction& ff = fam[cp];
    const auto lcomps = ls == f.shift ? std::vector<Pattern>{cp}
                                      : shift_completions(c, static_cast<std::size_t>(ls));
    for (const Pattern& lp : lcomps) {
      const auto& bp = fam[lp].bounds();
      const double lo = chain_bound(f.lower, ls, bp, c, b, true);
      const double hi = chain_bound(f.upper, ls, bp, c, b, false);
      const double v = interval_lower_bound(ff, lo, hi);
      if (v < out.value) {
        out.value = v;
        if (detail) out.where = cp.str() + " [" + fmt(lo) + ", " + fmt(hi) + "] -> " + fmt(v);
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<CaseSpec>& case_table() {
  static const std::vector<CaseSpec> table = build_table();
  return table;
}

std::vector<DigitState> legal_digit_states(const Pattern& c) { return states_for(c); }

bool case_applies(const CaseSpec& spec, const DigitState& s) {
  for (const auto& d : spec.digits) {
    const int v = s.b[static_cast<std::size_t>(d.level)];
    if (v < d.lo || v > d.hi) return false;
  }
  return spec.parity == Parity::Any || spec.parity == s.rpar;
}

double chain_bound(const Chain& chain, int s, const PatternBounds& bp, const Pattern& c,
                   std::span<const int> b, bool lower) {
  double sum = 0;
  for (const auto& term : chain) {
    const int m = term.j - s;
    if (m < 0 || m > 5) throw std::out_of_range("chain index outside lambda_{c,0..5}");
    const double lmin = m == 0 ? bp.lambda_min : bp.lambda_j_min[static_cast<std::size_t>(m)];
    const double lmax = m == 0 ? bp.lambda_max : bp.lambda_j_max[static_cast<std::size_t>(m)];
    const double v = coef_value(term.coef, c, b);
    if (lower)
      sum += v * (v < 0 ? lmax : lmin);
    else
      sum += v * (v > 0 ? lmax : lmin);
  }
  return sum;
}

UniversalValues universal_values(const FamilyTable& fam) {
  UniversalValues u{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < kPatternCount; ++i) {
    const FFunction& f = fam.at(i);
    const auto& b = f.bounds();
    u.t0 = std::min({u.t0, f(0.0), f(b.lambda_j_max[1])});
    const int c5 = f.pattern().c(5);
    if (c5 >= 2) u.t1 = std::min({u.t1, f(b.lambda_j_min[1]), f(b.lambda_j_max[1] + b.lambda_max)});
    if (c5 == 3)
      u.t2 = std::min({u.t2, f(b.lambda_j_min[1] + b.lambda_min),
                       f(b.lambda_j_max[1] + 2 * b.lambda_max)});
  }
  return u;
}

CaseOutcome verify_case(const CaseSpec& spec, const Pattern& c, const FamilyTable& fam,
                        const UniversalValues& u, bool printed_reading) {
  const auto& factors = printed_reading && !spec.printed.empty() ? spec.printed : spec.factors;
  std::set<int> refs;
  for (const auto& f : factors) referenced_b(f, refs);

  // distinct values of the referenced b digits among the states of this case
  std::set<std::array<int, 7>> variants;
  for (const auto& s : states_for(c)) {
    if (!case_applies(spec, s)) continue;
    std::array<int, 7> key{};
    for (int r : refs) key[static_cast<std::size_t>(r)] = s.b[static_cast<std::size_t>(r)];
    variants.insert(key);
  }
  CaseOutcome out;
  if (variants.empty()) return out;
  out.eligible = true;
  out.value = std::numeric_limits<double>::infinity();

  for (const auto& key : variants) {
    std::vector<FactorEval> ev;
    ev.reserve(factors.size());
    for (const auto& f : factors) ev.push_back(eval_factor(f, c, key, fam, u, false));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& prod : spec.combination) {
      double p = 1;
      for (int i : prod) p *= ev.at(static_cast<std::size_t>(i)).value;
      best = std::max(best, p);
    }
    if (best < out.value) {
      out.value = best;
      std::string d;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        if (!d.empty()) d += "; ";
        d += "F" + std::to_string(i) + "(s=" + std::to_string(factors[i].shift) +
             ",t=" + std::to_string(factors[i].t) + ") " +
             eval_factor(factors[i], c, key, fam, u, true).where;
      }
      if (!refs.empty()) {
        for (int r : refs) d += "; b_{k+" + std::to_string(r) + "}=" + std::to_string(key[r]);
      }
      out.detail = std::move(d);
    }
  }
  return out;
}

// ---- full run ---------------------------------------------------------------

std::vector<Pattern> smoke_sample() {
  std::vector<Pattern> out;
  for (std::size_t i = 0; i < 200; ++i) out.push_back(Pattern::from_index(i * kPatternCount / 200));
  return out;
}

namespace {

struct Reduced {
  double value = std::numeric_limits<double>::infinity();
  std::string witness;
  void take(double v, const std::string& w) {
    if (v < value) {
      value = v;
      witness = w;
    }
  }
};

}  // namespace

VerificationReport run_full(const RunOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  opt.params.validate();
  VerificationReport rep;
  rep.params = opt.params;
  rep.smoke = opt.smoke;

  const WTable w = opt.w_table ? *opt.w_table : compute_w_table(opt.params, opt.jobs);
  const FamilyTable fam(opt.params, w, opt.jobs);
  const UniversalValues u = universal_values(fam);

  std::vector<Pattern> pats = opt.patterns;
  if (pats.empty()) pats = enumerate_patterns();
  std::sort(pats.begin(), pats.end());
  pats.erase(std::unique(pats.begin(), pats.end()), pats.end());
  rep.pattern_count = pats.size();

  rep.patterns.resize(pats.size());
  parallel_for(pats.size(), opt.jobs, [&](std::size_t i) {
    const FFunction& f = fam[pats[i]];
    const auto& b = f.bounds();
    PatternResult& r = rep.patterns[i];
    r.pattern = pats[i].str();
    r.F0 = f(0.0);
    r.F_negpert = f(grid_point(grid_index_below(b.eps_min)));
    r.F_posmax = f(b.eps_max);
    r.t0 = std::min(f(0.0), f(b.lambda_j_max[1]));
    if (pats[i].c(5) >= 2) r.t1 = std::min(f(b.lambda_j_min[1]), f(b.lambda_j_max[1] + b.lambda_max));
    if (pats[i].c(5) == 3)
      r.t2 = std::min(f(b.lambda_j_min[1] + b.lambda_min), f(b.lambda_j_max[1] + 2 * b.lambda_max));
    const GridValues g = grid_values(f);
    const UnimodalResult um = check_unimodal(g.values, g.first);
    r.unimodal = um.ok;
    r.argmax = um.argmax;
    r.plateau = um.plateau;
    r.W = f.W();
    r.restarts = f.restarts();
  });

  Reduced zero, neg, pmax, t0, t1, t2;
  for (const auto& r : rep.patterns) {
    zero.take(r.F0, r.pattern);
    neg.take(r.F_negpert, r.pattern);
    pmax.take(r.F_posmax, r.pattern);
    t0.take(r.t0, r.pattern);
    if (r.t1) t1.take(*r.t1, r.pattern);
    if (r.t2) t2.take(*r.t2, r.pattern);
    if (!r.unimodal) rep.unimodality_failures.push_back(r.pattern);
    if (r.plateau > 1) rep.plateau_flags.push_back(r.pattern);
    ++rep.restart_histogram[r.restarts];
  }

  auto add_check = [&](const std::string& name, const Reduced& red, double threshold,
                       bool required) {
    if (auto it = opt.threshold_overrides.find(name); it != opt.threshold_overrides.end())
      threshold = it->second;
    if (!std::isfinite(red.value)) return;
    Check c{name, red.value, threshold, red.witness, required, red.value >= threshold + kSafety};
    rep.checks.push_back(c);
  };
  add_check("zero", zero, opt.smoke ? 1.0 : 1.14671, true);
  add_check("negpert", neg, 0.35, !opt.smoke);
  add_check("pos_max", pmax, kProductBound, !opt.smoke);
  add_check("pos_t0", t0, 1.14671, !opt.smoke);
  add_check("pos_t1", t1, 1.53232, !opt.smoke);
  add_check("pos_t2", t2, 1.2866, !opt.smoke);

  const auto& table = case_table();
  rep.cases.resize(table.size());
  parallel_for(table.size(), opt.jobs, [&](std::size_t ci) {
    const CaseSpec& spec = table[ci];
    CaseResult cr;
    cr.id = spec.id;
    cr.target = spec.target;
    cr.required = !opt.smoke;
    Reduced red, printed;
    for (const Pattern& p : pats) {
      const CaseOutcome o = verify_case(spec, p, fam, u);
      if (!o.eligible) continue;
      ++cr.eligible_patterns;
      if (o.value < red.value) {
        red.value = o.value;
        red.witness = p.str();
        cr.witness_detail = o.detail;
      }
      if (!spec.printed.empty()) printed.take(verify_case(spec, p, fam, u, true).value, p.str());
    }
    cr.value = cr.eligible_patterns ? red.value : 0.0;
    cr.witness_pattern = red.witness;
    if (!spec.printed.empty() && cr.eligible_patterns) cr.printed_value = printed.value;
    const double threshold = opt.threshold_overrides.count(spec.id)
                                 ? opt.threshold_overrides.at(spec.id)
                                 : kProductBound;
    cr.pass = cr.eligible_patterns == 0 ||
              (cr.value > threshold + kSafety && cr.value >= spec.target - kTranscriptionSlack);
    rep.cases[ci] = std::move(cr);
  });

  bool pass = rep.unimodality_failures.empty() || opt.smoke;
  for (const auto& c : rep.checks) pass = pass && (c.pass || !c.required);
  for (const auto& c : rep.cases) pass = pass && (c.pass || !c.required);
  rep.pass = pass;
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// ---- JSON -------------------------------------------------------------------

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kCheckOrder = {"zero",   "negpert", "pos_max",
                                                         "pos_t0", "pos_t1",  "pos_t2"};
std::size_t check_rank(std::string_view name) {
  return static_cast<std::size_t>(std::find(kCheckOrder.begin(), kCheckOrder.end(), name) -
                                  kCheckOrder.begin());
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string report_to_json(const VerificationReport& r, bool with_patterns, bool with_time) {
  json j;
  j["params"] = {{"n0", r.params.n0}, {"T", r.params.T}, {"m", r.params.m}};
  j["smoke"] = r.smoke;
  j["pattern_count"] = r.pattern_count;
  j["global_status"] = r.pass ? "PASS" : "FAIL";
  json checks = json::object();
  for (const auto& c : r.checks)
    checks[c.name] = {{"value", c.value},       {"threshold", c.threshold},
                      {"margin", c.value - c.threshold}, {"witness", c.witness},
                      {"required", c.required}, {"pass", c.pass}};
  j["worst_margins"] = checks;
  json cases = json::array();
  for (const auto& c : r.cases)
    cases.push_back({{"id", c.id},
                     {"target", c.target},
                     {"min_value", c.value},
                     {"min_margin", c.value - kProductBound},
                     {"target_gap", c.value - c.target},
                     {"witness_pattern", c.witness_pattern},
                     {"witness", c.witness_detail},
                     {"eligible_patterns", c.eligible_patterns},
                     {"required", c.required},
                     {"pass", c.pass},
                     {"printed_reading_value", opt_json(c.printed_value)}});
  j["cases"] = cases;
  j["unimodality_failures"] = r.unimodality_failures;
  j["plateau_flags"] = r.plateau_flags;
  json hist = json::object();
  for (const auto& [k, v] : r.restart_histogram) hist[std::to_string(k)] = v;
  j["restart_histogram"] = hist;
  if (with_patterns) {
    json pats = json::array();
    for (const auto& p : r.patterns)
      pats.push_back({{"pattern", p.pattern}, {"F0", p.F0},
                      {"F_negpert", p.F_negpert}, {"F_posmax", p.F_posmax},
                      {"t0", p.t0}, {"t1", opt_json(p.t1)},
                      {"t2", opt_json(p.t2)}, {"unimodal", p.unimodal},
                      {"argmax", p.argmax}, {"plateau", p.plateau},
                      {"W", p.W}, {"restarts", p.restarts}});
    j["patterns"] = pats;
  }
  if (with_time) j["wall_time_seconds"] = r.wall_time_seconds;
  return j.dump(2) + "\n";
}

VerificationReport report_from_json(std::string_view text) {
  const json j = json::parse(text);
  VerificationReport r;
  r.params = {j.at("params").at("n0").get<int>(), j.at("params").at("T").get<int>(),
              j.at("params").at("m").get<int>()};
  r.smoke = j.at("smoke").get<bool>();
  r.pattern_count = j.at("pattern_count").get<std::size_t>();
  r.pass = j.at("global_status").get<std::string>() == "PASS";
  for (const auto& [name, c] : j.at("worst_margins").items())
    r.checks.push_back({name, c.at("value").get<double>(), c.at("threshold").get<double>(),
                        c.at("witness").get<std::string>(), c.at("required").get<bool>(),
                        c.at("pass").get<bool>()});
  // back to run order
  std::stable_sort(r.checks.begin(), r.checks.end(), [](const Check& x, const Check& y) {
    return check_rank(x.name) < check_rank(y.name);
  });
  for (const auto& c : j.at("cases")) {
    CaseResult cr;
    cr.id = c.at("id").get<std::string>();
    cr.target = c.at("target").get<double>();
    cr.value = c.at("min_value").get<double>();
    cr.witness_pattern = c.at("witness_pattern").get<std::string>();
    cr.witness_detail = c.at("witness").get<std::string>();
    cr.eligible_patterns = c.at("eligible_patterns").get<std::size_t>();
    cr.required = c.at("required").get<bool>();
    cr.pass = c.at("pass").get<bool>();
    cr.printed_value = opt_from(c.at("printed_reading_value"));
    r.cases.push_back(std::move(cr));
  }
  r.unimodality_failures = j.at("unimodality_failures").get<std::vector<std::string>>();
  r.plateau_flags = j.at("plateau_flags").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("restart_histogram").items())
    r.restart_histogram[std::stoi(k)] = v.get<int>();
  if (j.contains("patterns")) {
    for (const auto& p : j.at("patterns")) {
      PatternResult pr;
      pr.pattern = p.at("pattern").get<std::string>();
      pr.F0 = p.at("F0").get<double>();
      pr.F_negpert = p.at("F_negpert").get<double>();
      pr.F_posmax = p.at("F_posmax").get<double>();
      pr.t0 = p.at("t0").get<double>();
      pr.t1 = opt_from(p.at("t1"));
      pr.t2 = opt_from(p.at("t2"));
      pr.unimodal = p.at("unimodal").get<bool>();
      pr.argmax = p.at("argmax").get<int>();
      pr.plateau = p.at("plateau").get<int>();
      pr.W = p.at("W").get<double>();
      pr.restarts = p.at("restarts").get<int>();
      r.patterns.push_back(std::move(pr));
    }
  }
  if (j.contains("wall_time_seconds")) r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return r;
}

}  // namespace sudler
