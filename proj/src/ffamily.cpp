#include "sudler/ffamily.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sudler {

void FParams::validate() const {
  if (n0 < 10) throw std::invalid_argument("n0 must be >= 10");
  if (T < n0 + 2) throw std::invalid_argument("T must be >= n0 + 2");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
}

namespace {

// Per-term pieces of w_min / w_max:
//   (1 - {ny}) [floor nx == floor ny] - 1/2   and   1/2 - {nx} [floor nx == floor ny]
template <class FloorX, class FloorY>
void term_sequences(std::int64_t ell, FloorX&& fx, FloorY&& fy, std::vector<double>& tmin,
                    std::vector<double>& tmax) {
  tmin.resize(static_cast<std::size_t>(ell) + 1);
  tmax.resize(static_cast<std::size_t>(ell) + 1);
  tmin[0] = tmax[0] = 0;
  for (std::int64_t n = 1; n <= ell; ++n) {
    const FloorFrac a = fx(n);
    const FloorFrac b = fy(n);
    const bool same = a.floor == b.floor;
    tmin[static_cast<std::size_t>(n)] = (same ? 1.0 - b.frac : 0.0) - 0.5;
    tmax[static_cast<std::size_t>(n)] = 0.5 - (same ? a.frac : 0.0);
  }
}

FloorFrac floor_frac(double x, std::int64_t n) {
  const double v = static_cast<double>(n) * x;
  const double fl = std::floor(v);
  return {static_cast<std::int64_t>(fl), v - fl};
}

WMinMax sum_terms(const std::vector<double>& tmin, const std::vector<double>& tmax) {
  WMinMax w;
  for (std::size_t n = 1; n < tmin.size(); ++n) {
    w.w_min += tmin[n];
    w.w_max += tmax[n];
  }
  return w;
}

double est_from_terms(const FParams& p, const std::vector<double>& tmin,
                      const std::vector<double>& tmax) {
  // running w_min(l), w_max(l); weights 1/(l(l+1))
  double wmin = 0, wmax = 0, smin = 0, smax = 0;
  for (int l = 1; l <= p.T; ++l) {
    wmin += tmin[static_cast<std::size_t>(l)];
    wmax += tmax[static_cast<std::size_t>(l)];
    if (l <= p.n0) continue;
    const double wt = 1.0 / (static_cast<double>(l) * (l + 1.0));
    smin += wmin * wt;
    smax += wmax * wt;
  }
  return std::max(std::fabs(smin), std::fabs(smax));
}

void require_ordered(double x, double y) {
  if (x > y) throw std::invalid_argument("w_minmax needs x <= y");
}

}  // namespace

WMinMax w_minmax(std::int64_t ell, const ContinuedFraction& x, const ContinuedFraction& y) {
  if (ell < 0) throw std::invalid_argument("ell must be >= 0");
  const MultiplesOf mx(x), my(y);
  require_ordered(mx.value(), my.value());
  std::vector<double> tmin, tmax;
  term_sequences(ell, [&](std::int64_t n) { return mx.at(n); },
                 [&](std::int64_t n) { return my.at(n); }, tmin, tmax);
  return sum_terms(tmin, tmax);
}

WMinMax w_minmax(std::int64_t ell, double x, double y) {
  if (ell < 0) throw std::invalid_argument("ell must be >= 0");
  require_ordered(x, y);
  std::vector<double> tmin, tmax;
  term_sequences(ell, [&](std::int64_t n) { return floor_frac(x, n); },
                 [&](std::int64_t n) { return floor_frac(y, n); }, tmin, tmax);
  return sum_terms(tmin, tmax);
}

double w_est(const FParams& params, const ContinuedFraction& x, const ContinuedFraction& y) {
  const MultiplesOf mx(x), my(y);
  require_ordered(mx.value(), my.value());
  thread_local std::vector<double> tmin, tmax;
  if (x == y) {
    term_sequences(params.T, [&](std::int64_t n) { return mx.at(n); },
                   [&](std::int64_t n) { return mx.at(n); }, tmin, tmax);
  } else {
    term_sequences(params.T, [&](std::int64_t n) { return mx.at(n); },
                   [&](std::int64_t n) { return my.at(n); }, tmin, tmax);
  }
  return est_from_terms(params, tmin, tmax);
}

double w_est(const FParams& params, double x, double y) {
  require_ordered(x, y);
  std::vector<double> tmin, tmax;
  term_sequences(params.T, [&](std::int64_t n) { return floor_frac(x, n); },
                 [&](std::int64_t n) { return floor_frac(y, n); }, tmin, tmax);
  return est_from_terms(params, tmin, tmax);
}

namespace {

struct Abort {};

class WRun {
 public:
  WRun(const FParams& p, double err) : p_(p), err_(err) {}

  double visit(std::vector<int>& word) {
    const auto lo = cf_min_expansion(word);
    const auto hi = cf_max_expansion(word);
    const double w = w_est(p_, lo, hi);
    ++evaluations;
    if (w < err_) {
      leaves.push_back({word, lo.value(), hi.value(), w});
      return w;
    }
    if (static_cast<int>(word.size()) >= p_.m) throw Abort{};
    double best = 0;
    for (int d = 1; d <= 3; ++d) {
      word.push_back(d);
      best = std::max(best, visit(word));
      word.pop_back();
    }
    return best;
  }

  std::vector<WLeaf> leaves;
  std::size_t evaluations = 0;

 private:
  const FParams& p_;
  double err_;
};

}  // namespace

WResult W_algorithm(std::span<const int> c_left, const FParams& params) {
  params.validate();
  std::vector<int> root(c_left.begin(), c_left.end());
  WResult out;
  const auto cmin = cf_min_expansion(root);
  const auto cmax = cf_max_expansion(root);
  double err = std::max(w_est(params, cmin, cmin), w_est(params, cmax, cmax)) + 1e-6;
  out.evaluations = 2;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000) throw std::runtime_error("W algorithm: too many threshold restarts");
    WRun run(params, err);
    std::vector<int> word = root;
    try {
      out.W = run.visit(word);
      out.evaluations += run.evaluations;
      out.err_max = err;
      out.restarts = attempt;
      out.leaves = std::move(run.leaves);
      return out;
    } catch (const Abort&) {
      out.evaluations += run.evaluations;
      err *= 1.05;
    }
  }
}

std::size_t left_word_index(const Pattern& c) {
  std::size_t idx = 0;
  for (int d : c.left_word()) idx = idx * 3 + static_cast<std::size_t>(d - 1);
  return idx;
}

std::vector<int> left_word_from_index(std::size_t index) {
  if (index >= kLeftWordCount) throw std::out_of_range("left word index");
  std::vector<int> w(4);
  for (std::size_t i = 4; i-- > 0;) {
    w[i] = static_cast<int>(index % 3) + 1;
    index /= 3;
  }
  return w;
}

double g_cn(const Pattern& c, const PatternBounds& b, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const auto left = c.left_word();
  const MultiplesOf lo(cf_min_expansion(left)), hi(cf_max_expansion(left));
  const FloorFrac a = hi.at(n), z = lo.at(n);
  if (a.floor != z.floor) {
    const double t = 1.0 - b.lambda_max / (2.0 * n);
    return t * t;
  }
  const double lam = a.frac >= 0.5 ? b.lambda_max : b.lambda_min;
  const double t = 1.0 - lam * (a.frac - 0.5) / n;
  return t * t;
}

FFunction::FFunction(const Pattern& c, const FParams& params, double W, int restarts)
    : pattern_(c), bounds_(pattern_bounds(c)), params_(params), W_(W), restarts_(restarts) {
  params_.validate();
  if (!(W >= 0)) throw std::invalid_argument("W must be >= 0");
  const double T = params_.T;
  tail_const_ = 2 * bounds_.lambda_max * (W_ + 4.5 * (1 + std::log(T)) / T);
  g_.assign(static_cast<std::size_t>(params_.n0) + 1, 0.0);
  for (int n = 1; n <= params_.n0; ++n) g_[static_cast<std::size_t>(n)] = g_cn(c, bounds_, n);
}

double FFunction::e(int n, double eps) const {
  const double a = eps + bounds_.lambda_max / 2;
  const double b = eps + bounds_.lambda_min / 2;
  return std::max(a * a, b * b) / (static_cast<double>(n) * n);
}

double FFunction::E(double eps) const {
  const double lm = bounds_.lambda_max;
  return lm + (eps * lm + eps * eps) / (params_.n0 + 1);
}

double FFunction::f_inf(double eps) const {
  const double lm = bounds_.lambda_max;
  const double s = eps + 0.5 * lm;
  const double e = E(eps);
  return 1 - (tail_const_ + (lm * lm / 4 + s * s + e * e) / params_.n0);
}

double FFunction::operator()(double eps) const {
  if (!in_domain(eps))
    throw std::domain_error("F_c evaluated outside its domain at " + std::to_string(eps) +
                            " for pattern " + pattern_.str());
  double v = 2 * std::numbers::pi * (eps + bounds_.lambda_min) * f_inf(eps);
  for (int n = 1; n <= params_.n0; ++n) v *= f_n(n, eps);
  return v;
}

std::vector<FTableRow> F_table(const FFunction& f, std::span<const double> grid) {
  std::vector<FTableRow> rows;
  rows.reserve(grid.size());
  const auto& b = f.bounds();
  for (double x : grid) {
    if (x >= b.eps_min && x <= b.eps_max)
      rows.push_back({x, f(x)});
    else
      rows.push_back({x, std::nullopt});
  }
  return rows;
}

}  // namespace sudler
