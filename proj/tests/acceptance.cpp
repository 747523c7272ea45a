// Acceptance run: one line per criterion, exit status 1 if any fails.
//
//   acceptance [--baseline FILE] [--jobs N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sudler/contfrac.hpp"
#include "sudler/ffamily.hpp"
#include "sudler/pattern.hpp"
#include "sudler/sudler.hpp"
#include "sudler/verify.hpp"

using namespace sudler;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int prec = 6) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(prec);
  os << x;
  return os.str();
}

ContinuedFraction random_alpha(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 3);
  std::vector<int> prefix(rng() % 5), period(1 + rng() % 3);
  for (int& x : prefix) x = d(rng);
  for (int& x : period) x = d(rng);
  return ContinuedFraction(0, prefix, period);
}

// ---- 1-3: one run at (20, 10000, 40) --------------------------------------

const VerificationReport& full_report(int jobs) {
  static const VerificationReport rep = [jobs] {
    RunOptions opt;
    opt.params = kFullParams;
    opt.jobs = jobs;
    return run_full(opt);
  }();
  return rep;
}

Outcome universal_inequalities(int jobs) {
  const auto& rep = full_report(jobs);
  Outcome o{true, ""};
  for (const char* name : {"zero", "negpert", "pos_t1", "pos_t2"}) {
    const auto it = std::find_if(rep.checks.begin(), rep.checks.end(),
                                 [&](const Check& c) { return c.name == name; });
    if (it == rep.checks.end()) return {false, std::string("missing check ") + name};
    const bool ok = it->value > it->threshold + kSafety;
    o.pass = o.pass && ok;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + name + " " + num(it->value) +
                (ok ? " > " : " <= ") + num(it->threshold) + (ok ? "" : " at " + it->witness);
  }
  o.detail += " (" + std::to_string(rep.pattern_count) + " patterns, " +
              num(rep.wall_time_seconds, 3) + " s)";
  return o;
}

Outcome case_study(int jobs) {
  const auto& rep = full_report(jobs);
  Outcome o{true, ""};
  std::string failed;
  double worst_gap = 1e9;
  std::string worst_id;
  for (const auto& c : rep.cases) {
    if (!c.pass) {
      o.pass = false;
      failed += (failed.empty() ? "" : "; ") + c.id + " " + num(c.value) + " vs " + num(c.target) +
                " at " + c.witness_pattern;
      continue;
    }
    if (c.eligible_patterns > 0 && c.value - c.target < worst_gap) {
      worst_gap = c.value - c.target;
      worst_id = c.id;
    }
  }
  o.detail = std::to_string(rep.cases.size()) + " cases";
  if (!worst_id.empty()) o.detail += ", tightest passing " + worst_id + " (" + num(worst_gap, 3) + ")";
  if (!failed.empty()) o.detail += ", failing: " + failed;
  return o;
}

Outcome unimodality(int jobs) {
  const auto& rep = full_report(jobs);
  const bool ok = rep.unimodality_failures.empty() && rep.plateau_flags.empty();
  return {ok, std::to_string(rep.unimodality_failures.size()) + " failures, " +
                  std::to_string(rep.plateau_flags.size()) + " plateau flags over " +
                  std::to_string(rep.pattern_count) + " patterns"};
}

// ---- 4-6: Sudler products ------------------------------------------------------

Outcome golden_constant() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto phi = parse_cf("[0;(1)]");
  std::int64_t f1 = 1, f2 = 1;  // F_1, F_2
  double worst = 0;
  std::string values;
  for (int n = 3; n <= 30; ++n) {
    const std::int64_t f = f1 + f2;
    f1 = f2;
    f2 = f;
    if (n < 24) continue;
    const double p = sudler_product(phi, f);
    worst = std::max(worst, std::fabs(p - 2.407));
    values += (values.empty() ? "" : " ") + num(p, 6);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 0.01 && secs < 10.0,
          "P_{F_24..30}(phi) = " + values + ", max |P - 2.407| = " + num(worst, 3) + ", " +
              num(secs, 3) + " s"};
}

Outcome decomposition() {
  std::mt19937_64 rng(2024);
  double worst = 0;
  std::string where;
  for (int i = 0; i < 200; ++i) {
    const auto a = random_alpha(rng);
    const auto n = 1 + static_cast<std::int64_t>(rng() % 100000);
    const auto r = decompose_check(a, n);
    if (r.relative_error >= worst) {
      worst = r.relative_error;
      where = format_cf(a) + " N=" + std::to_string(n);
    }
  }
  return {worst < 1e-9, "200 pairs, max relative error " + num(worst, 3) + " at " + where};
}

Outcome hk_convergence() {
  const auto a = parse_cf("[0;(1,2,3)]");
  Outcome o{true, ""};
  for (auto [k, tol] : {std::pair<std::size_t, double>{20, 0.05}, {30, 0.02}}) {
    const Convergents c(a, k + 2);
    const double lo = -c.lambda(k) + c.lambda_kj(k, 1);
    const double hi = static_cast<double>(c.a(k + 1) - 1) * c.lambda(k) + c.lambda_kj(k, 1);
    const PerturbedEvaluator p(a, k);
    const HkEvaluator h(a, k);
    std::vector<double> xs{-0.3, 0.0, 0.3, 0.6};
    for (int i = 0; i < kGridSize; ++i)
      if (grid_point(i) >= lo && grid_point(i) <= hi) xs.push_back(grid_point(i));
    double sup = 0;
    for (double x : xs) sup = std::max(sup, std::fabs(p(x) - h(x).value));
    o.pass = o.pass && sup < tol;
    o.detail += std::string(o.detail.empty() ? "" : ", ") + "k=" + std::to_string(k) + " sup " +
                num(sup, 3) + " over " + std::to_string(xs.size()) + " points (< " + num(tol) + ")";
  }
  return o;
}

// ---- 7: property suites ----------------------------------------------------------

std::vector<int> word_from_index(std::size_t idx, std::size_t len) {
  std::vector<int> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = static_cast<int>(idx % 3) + 1;
    idx /= 3;
  }
  return out;
}

Integer cont(const std::vector<int>& v, std::size_t from, std::size_t to) {
  if (from >= to) return 1;
  return continuant(std::span<const int>(v.data() + from, to - from));
}

bool continuant_identities() {
  std::size_t count = 1;
  for (std::size_t len = 1; len <= 12; ++len) {
    count *= 3;
    for (std::size_t idx = 0; idx < count; ++idx) {
      const auto v = word_from_index(idx, len);
      const Integer full = cont(v, 0, len);
      if (len >= 2 && full != v[len - 1] * cont(v, 0, len - 1) + cont(v, 0, len - 2)) return false;
      for (std::size_t k = 1; k < len; ++k)
        if (full != cont(v, 0, k) * cont(v, k, len) + cont(v, 0, k - 1) * cont(v, k + 1, len))
          return false;
      const std::vector<int> r(v.rbegin(), v.rend());
      if (full != cont(r, 0, len)) return false;
    }
  }
  return true;
}

bool delta_identities() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> prefix(static_cast<std::size_t>(trial % 9));
    for (int& x : prefix) x = d(rng);
    std::vector<int> period(1 + static_cast<std::size_t>(trial % 3));
    for (int& x : period) x = d(rng);
    const ContinuedFraction alpha(0, prefix, period);
    const std::size_t K = 40;
    const Convergents c(alpha, K);
    std::vector<long double> dl(K + 84);
    long double prod = 1.0L;
    for (std::size_t j = 0; j < dl.size(); ++j) {
      prod /= alpha.tail(j + 1).value_ld();
      dl[j] = prod;
    }
    for (std::size_t k = 1; k + 2 <= K; ++k) {
      const double prev = k == 1 ? static_cast<double>(c.signed_free_delta(0)) : c.delta(k - 1);
      // recurrence delta_{k+1} = delta_{k-1} - a_{k+1} delta_k
      if (std::fabs(c.delta(k + 1) - (prev - c.a(k + 1) * c.delta(k))) > 1e-12 * prev) return false;
      // ratio delta_{k+2} / delta_k < 1/2
      if (!(c.delta(k + 2) / c.delta(k) < 0.5)) return false;
      // delta_k = sum_t a_{k+2t} delta_{k+2t-1}, 40 terms
      long double sum = 0;
      for (std::size_t t = 1; t <= 40; ++t) sum += alpha.digit(k + 2 * t) * dl[k + 2 * t - 1];
      if (std::fabs(static_cast<double>(sum) - c.delta(k)) > 1e-12 * c.delta(k)) return false;
    }
  }
  return true;
}

bool ostrowski_suite() {
  for (const char* s : {"[0;(1)]", "[0;(2)]", "[0;(3)]", "[0;(1,2,3)]", "[0;2,1,(3,1)]"}) {
    const auto alpha = parse_cf(s);
    const Convergents c(alpha, 25);
    const auto q25 = static_cast<std::int64_t>(c.q(25));
    auto ok = [&](std::int64_t n) {
      const auto e = ostrowski_expand(n, alpha);
      return is_legal_ostrowski(e.digits, alpha) && ostrowski_value(e) == n;
    };
    for (std::int64_t n = 0; n < std::min<std::int64_t>(q25, 300000); ++n)
      if (!ok(n)) return false;
    std::mt19937_64 rng(25);
    for (int i = 0; i < 50000; ++i)
      if (!ok(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q25)))) return false;
    for (std::int64_t n = std::max<std::int64_t>(0, q25 - 2000); n < q25; ++n)
      if (!ok(n)) return false;
  }
  return true;
}

bool sandwich() {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    double x = u(rng), y = u(rng);
    if (x > y) std::swap(x, y);
    const double z = x + (y - x) * u(rng);
    const int ell = 1 + static_cast<int>(rng() % 500);
    double S = 0;
    for (int n = 1; n <= ell; ++n) S += 0.5 - (n * z - std::floor(n * z));
    const auto w = w_minmax(ell, x, y);
    if (!(w.w_min <= S + 1e-12 && S <= w.w_max + 1e-12)) return false;
  }
  return true;
}

bool epsilon_ranges() {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_alpha(rng);
    const auto n = 1 + static_cast<std::int64_t>(rng() % 1000000);
    const auto e = ostrowski_expand(n, a);
    const Convergents c(a, e.top_level() + 2);
    for (std::size_t lvl = 1; lvl <= e.top_level(); ++lvl) {
      const std::int64_t b = e.digit(lvl);
      if (b == 0) continue;
      const double lo = -c.lambda(lvl) + c.lambda_kj(lvl, 1);
      const double hi = static_cast<double>(c.a(lvl + 1) - 1) * c.lambda(lvl) + c.lambda_kj(lvl, 1);
      for (std::int64_t t = 0; t < b; ++t) {
        const double eps = epsilon_shift(c, e, lvl, t);
        if (eps < lo - 1e-12 || eps > hi + 1e-12) return false;
      }
    }
  }
  return true;
}

bool pattern_invariants() {
  for (const auto& c : enumerate_patterns()) {
    const auto b = pattern_bounds(c);
    if (!(b.cev_max - b.cev_min < 3.0 / 25.0)) return false;
    if (!(b.eps_min > -1)) return false;
    if (!(b.eps_min >= -b.lambda_min)) return false;
  }
  return true;
}

Outcome property_suites() {
  const std::vector<std::pair<std::string, std::function<bool()>>> suites{
      {"continuants", continuant_identities}, {"delta", delta_identities},
      {"ostrowski", ostrowski_suite},         {"sandwich", sandwich},
      {"eps-range", epsilon_ranges},          {"patterns", pattern_invariants}};
  Outcome o{true, ""};
  for (const auto& [name, fn] : suites) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception&) {
      ok = false;
    }
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : " ") + name + (ok ? ":ok" : ":FAIL");
  }
  return o;
}

// ---- 8: W oracle -------------------------------------------------------------------

double uniform_cover(const std::vector<int>& left, int depth, const FParams& params) {
  int cells = 1;
  for (int i = 0; i < depth; ++i) cells *= 3;
  double best = 0;
  for (int w = 0; w < cells; ++w) {
    std::vector<int> word(left.begin(), left.end());
    int r = w;
    for (int i = 0; i < depth; ++i) {
      word.push_back(r % 3 + 1);
      r /= 3;
    }
    best = std::max(best, w_est(params, cf_min_expansion(word), cf_max_expansion(word)));
  }
  return best;
}

Outcome w_oracle() {
  Outcome o{true, ""};
  std::string failed;
  double worst = 0;
  for (const char* pat : {"111111111", "123123123", "213131313", "331213122", "333333333"}) {
    const auto c = Pattern::parse(pat);
    const double W = W_algorithm(c, kSmokeParams).W;
    const double d6 = uniform_cover(c.left_word(), 6, kSmokeParams);
    const double diff = std::fabs(W - d6);
    worst = std::max(worst, diff);
    if (!(diff < 5e-3)) {
      o.pass = false;
      const double full = uniform_cover(c.left_word(), kSmokeParams.m - 4, kSmokeParams);
      failed += std::string(failed.empty() ? "" : "; ") + pat + " W=" + num(W) + " depth6=" +
                num(d6) + " (depth " + std::to_string(kSmokeParams.m - 4) + ": " + num(full) + ")";
    }
  }
  o.detail = "5 patterns, max |W - depth6| = " + num(worst, 3);
  if (!failed.empty()) o.detail += ", outside 5e-3: " + failed;
  return o;
}

// ---- 9: liminf regression ----------------------------------------------------------

Outcome liminf_regression(const std::filesystem::path& baseline) {
  const std::vector<std::string> alphas{"[0;(1)]", "[0;(3)]", "[0;(1,3)]", "[0;(1,2,3)]"};
  nlohmann::json now = nlohmann::json::object();
  bool positive = true;
  for (const auto& s : alphas) {
    const auto r = empirical_liminf(parse_cf(s), 100000);
    positive = positive && r.min_value > 0;
    now[s] = {{"min_value", r.min_value}, {"argmin", r.argmin}};
  }
  if (!std::filesystem::exists(baseline)) {
    std::filesystem::create_directories(baseline.parent_path());
    std::ofstream(baseline) << now.dump(2) << "\n";
    return {positive, "all minima > 0; baseline recorded at " + baseline.string()};
  }
  nlohmann::json old;
  std::ifstream(baseline) >> old;
  double worst = 0;
  bool same_argmin = true;
  for (const auto& s : alphas) {
    const double a = old.at(s).at("min_value").get<double>();
    const double b = now.at(s).at("min_value").get<double>();
    worst = std::max(worst, std::fabs(a - b));
    same_argmin = same_argmin && old.at(s).at("argmin") == now.at(s).at("argmin");
  }
  std::string mins;
  for (const auto& s : alphas) mins += (mins.empty() ? "" : " ") + num(now[s]["min_value"].get<double>());
  return {positive && worst <= 1e-9 && same_argmin,
          "minima " + mins + ", max drift from baseline " + num(worst, 3) +
              (same_argmin ? "" : ", argmin changed")};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path baseline = SUDLER_LIMINF_BASELINE;
  int jobs = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--baseline" && i + 1 < argc) {
      baseline = argv[++i];
    } else if (a == "--jobs" && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--baseline FILE] [--jobs N]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"universal inequalities", [&] { return universal_inequalities(jobs); }},
      {"case study", [&] { return case_study(jobs); }},
      {"unimodality", [&] { return unimodality(jobs); }},
      {"golden-ratio constant", golden_constant},
      {"decomposition identity", decomposition},
      {"H_k convergence", hk_convergence},
      {"property suites", property_suites},
      {"W oracle", w_oracle},
      {"liminf regression", [&] { return liminf_regression(baseline); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria pass\n";
  return failures == 0 ? 0 : 1;
}
