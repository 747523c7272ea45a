#include "sudler/sudler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sudler {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr double kPi = std::numbers::pi;

// Neumaier compensated sum.
struct CompensatedSum {
  long double sum = 0.0L;
  long double comp = 0.0L;
  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + comp; }
};

struct ExactFraction {
  Integer p;
  Integer q;
};

ExactFraction rational_value(const ContinuedFraction& cf) {
  Integer p = 1, pp = 0, q = 0, qp = 1;
  for (std::size_t i = 0; i <= cf.finite_length(); ++i) {
    const Integer d = cf.digit(i);
    const Integer np = d * p + pp;
    const Integer nq = d * q + qp;
    pp = p;
    qp = q;
    p = np;
    q = nq;
  }
  return {p, q};
}

}  // namespace

Rotation::Rotation(const ContinuedFraction& alpha) {
  constexpr Integer kLimit = Integer{1} << 62;
  if (alpha.is_rational()) {
    const auto [p, q] = rational_value(alpha);
    if (q >= kLimit) throw std::overflow_error("rational denominator too large");
    q_ = static_cast<std::int64_t>(q);
    p_ = static_cast<std::int64_t>(p % q);
    return;
  }
  Integer q_prev = 0, q = 1;
  std::size_t K = 0;
  for (std::size_t k = 1;; ++k) {
    const Integer nq = alpha.digit(k) * q + q_prev;
    if (nq >= kLimit) break;
    q_prev = q;
    q = nq;
    K = k;
  }
  const Convergents conv(alpha, K);
  q_ = static_cast<std::int64_t>(conv.q(K));
  p_ = static_cast<std::int64_t>(conv.p(K) % conv.q(K));
  const long double sign = (K % 2 == 0) ? 1.0L : -1.0L;
  if (K == 0) {
    eta_ = alpha.value_ld() - static_cast<long double>(alpha.a0());
  } else {
    eta_ = sign * conv.signed_free_delta(K) / static_cast<long double>(q_);
  }
}

long double Rotation::centered(std::int64_t r) const {
  Integer res = (static_cast<Integer>(r) * p_) % q_;
  if (res < 0) res += q_;
  if (2 * res > q_) res -= q_;
  long double c = static_cast<long double>(res) / static_cast<long double>(q_) +
                  static_cast<long double>(r) * eta_;
  if (c > 0.5L) c -= 1.0L;
  if (c < -0.5L) c += 1.0L;
  return c;
}

long double Rotation::frac(std::int64_t r) const {
  long double c = centered(r);
  if (c < 0) c += 1.0L;
  return c >= 1.0L ? 0.0L : c;
}

double LogMagnitude::value() const { return zero ? 0.0 : std::exp(log_abs); }

LogMagnitude sudler_log_product(const ContinuedFraction& alpha, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("Sudler product needs N >= 0");
  const Rotation rot(alpha);
  LogMagnitude out;
  if (n <= 10000) {
    long double prod = 1.0L;
    for (std::int64_t r = 1; r <= n; ++r) {
      const long double c = rot.centered(r);
      if (c == 0.0L) return {0.0, true};
      prod *= 2.0L * std::fabs(std::sin(kPiL * c));
    }
    out.log_abs = static_cast<double>(std::log(prod));
    return out;
  }
  CompensatedSum acc;
  for (std::int64_t r = 1; r <= n; ++r) {
    const long double c = rot.centered(r);
    if (c == 0.0L) return {0.0, true};
    acc.add(std::log(2.0L * std::fabs(std::sin(kPiL * c))));
  }
  out.log_abs = static_cast<double>(acc.value());
  return out;
}

double sudler_product(const ContinuedFraction& alpha, std::int64_t n) {
  return sudler_log_product(alpha, n).value();
}

// ---------------------------------------------------------------------------

namespace {

struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;  // 0 for an exact zero
};

// prod_{r=1}^{q} 2 sin(pi (c_r + s * eps / q)) with the centered phases c_r.
SignedLog signed_product(const std::vector<long double>& phases, double s_over_q, double eps,
                         bool signed_factors) {
  CompensatedSum acc;
  int sign = 1;
  const long double shift = static_cast<long double>(s_over_q) * eps;
  for (long double c : phases) {
    const long double x = c + shift;
    const double v = 2.0 * std::sin(kPi * static_cast<double>(x));
    if (v == 0.0) return {0.0, 0};
    if (v < 0) sign = -sign;
    acc.add(std::log(std::fabs(static_cast<long double>(v))));
  }
  return {static_cast<double>(acc.value()), signed_factors ? sign : 1};
}

std::vector<long double> level_phases(const Rotation& rot, std::int64_t q) {
  std::vector<long double> phases(static_cast<std::size_t>(q));
  for (std::int64_t r = 1; r <= q; ++r) phases[static_cast<std::size_t>(r - 1)] = rot.centered(r);
  return phases;
}

class Chebyshev {
 public:
  Chebyshev() = default;
  Chebyshev(double radius, const std::vector<double>& node_values) : radius_(radius) {
    const std::size_t n = node_values.size();
    coeffs_.assign(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      long double s = 0.0L;
      for (std::size_t i = 0; i < n; ++i)
        s += node_values[i] * std::cos(kPiL * m * (i + 0.5L) / n);
      coeffs_[m] = static_cast<double>(2.0L * s / n);
    }
    coeffs_[0] *= 0.5;
  }

  static std::vector<double> nodes(double radius, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = static_cast<double>(radius * std::cos(kPiL * (i + 0.5L) / n));
    return x;
  }

  double operator()(double x) const {
    if (std::fabs(x) > radius_ * (1.0 + 1e-12))
      throw std::logic_error("Chebyshev argument outside the interpolation interval");
    const double y = x / radius_;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t m = coeffs_.size(); m-- > 1;) {
      const double b0 = 2.0 * y * b1 - b2 + coeffs_[m];
      b2 = b1;
      b1 = b0;
    }
    return y * b1 - b2 + coeffs_[0];
  }

 private:
  double radius_ = 1.0;
  std::vector<double> coeffs_;
};

}  // namespace

struct PerturbedEvaluator::Impl {
  bool direct = true;
  double s_over_q = 0.0;  // (-1)^n / q_n
  std::vector<long double> phases;
  double radius = 0.0;
  Chebyshev top;
};

PerturbedEvaluator::PerturbedEvaluator(const ContinuedFraction& alpha, std::size_t n)
    : PerturbedEvaluator(alpha, n, Options{}) {}

PerturbedEvaluator::PerturbedEvaluator(const ContinuedFraction& alpha, std::size_t n,
                                       Options options)
    : impl_(std::make_unique<Impl>()), n_(n) {
  const Convergents conv(alpha, n);
  const Rotation rot(alpha);
  const Integer qn = conv.q(n);
  if (qn <= options.direct_limit) {
    impl_->direct = true;
    impl_->s_over_q = ((n % 2 == 0) ? 1.0 : -1.0) / static_cast<double>(qn);
    impl_->phases = level_phases(rot, static_cast<std::int64_t>(qn));
    return;
  }
  if (alpha.is_rational()) throw std::invalid_argument("level climbing needs an irrational alpha");

  impl_->direct = false;
  std::size_t b1 = 1;
  while (b1 + 1 < n && conv.q(b1 + 1) <= options.base_limit) ++b1;
  const std::size_t b0 = b1 - 1;

  std::int64_t amax = 1;
  for (std::size_t j = 1; j <= n; ++j) amax = std::max(amax, conv.a(j));
  const double radius = std::max(4.0, 2.0 * static_cast<double>(amax));
  impl_->radius = radius;
  const std::size_t npts = static_cast<std::size_t>(options.degree) + 1;
  const std::vector<double> x = Chebyshev::nodes(radius, npts);

  auto direct_level = [&](std::size_t j) {
    const auto phases = level_phases(rot, static_cast<std::int64_t>(conv.q(j)));
    const double s = ((j % 2 == 0) ? 1.0 : -1.0) / conv.q_real(j);
    std::vector<double> v(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      const SignedLog sl = signed_product(phases, s, x[i], true);
      v[i] = sl.sign * std::exp(sl.log_abs);
    }
    return Chebyshev(radius, v);
  };

  Chebyshev prev2 = direct_level(b0);
  Chebyshev prev1 = direct_level(b1);
  for (std::size_t j = b1 + 1; j <= n; ++j) {
    const long double qj = static_cast<long double>(conv.q(j));
    const double r1 = static_cast<double>(static_cast<long double>(conv.q(j - 1)) / qj);
    const double r2 = static_cast<double>(static_cast<long double>(conv.q(j - 2)) / qj);
    const double lam1 = conv.lambda(j - 1);
    const double back = static_cast<double>(conv.a(j)) * conv.lambda_kj(j - 2, 1);
    const std::int64_t aj = conv.a(j);
    std::vector<double> v(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      double prod = prev2(x[i] * r2 - back);
      for (std::int64_t t = 0; t < aj; ++t) prod *= prev1(static_cast<double>(t) * lam1 - x[i] * r1);
      v[i] = prod;
    }
    prev2 = std::move(prev1);
    prev1 = Chebyshev(radius, v);
  }
  impl_->top = std::move(prev1);
}

PerturbedEvaluator::~PerturbedEvaluator() = default;
PerturbedEvaluator::PerturbedEvaluator(PerturbedEvaluator&&) noexcept = default;
PerturbedEvaluator& PerturbedEvaluator::operator=(PerturbedEvaluator&&) noexcept = default;

bool PerturbedEvaluator::is_direct() const noexcept { return impl_->direct; }
double PerturbedEvaluator::radius() const noexcept { return impl_->radius; }

LogMagnitude PerturbedEvaluator::log_value(double eps) const {
  if (impl_->direct) {
    const SignedLog sl = signed_product(impl_->phases, impl_->s_over_q, eps, false);
    if (sl.sign == 0) return {0.0, true};
    return {sl.log_abs, false};
  }
  if (std::fabs(eps) > impl_->radius)
    throw std::domain_error("perturbation outside the interpolated range");
  const double v = std::fabs(impl_->top(eps));
  if (v == 0.0) return {0.0, true};
  return {std::log(v), false};
}

double PerturbedEvaluator::operator()(double eps) const {
  if (!impl_->direct) {
    if (std::fabs(eps) > impl_->radius)
      throw std::domain_error("perturbation outside the interpolated range");
    return std::fabs(impl_->top(eps));
  }
  return log_value(eps).value();
}

double perturbed_product(const ContinuedFraction& alpha, std::size_t n, double eps) {
  return PerturbedEvaluator(alpha, n)(eps);
}

// ---------------------------------------------------------------------------

double epsilon_shift(const Convergents& conv, const OstrowskiExpansion& expansion, std::size_t i,
                     std::int64_t t) {
  const std::size_t top = expansion.top_level();
  if (i > top) throw std::out_of_range("level exceeds the top Ostrowski level");
  if (t < 0) throw std::invalid_argument("counter must be >= 0");
  long double eps = static_cast<long double>(t) * conv.lambda(i);
  for (std::size_t j = 1; i + j <= top; ++j) {
    const std::int64_t b = expansion.digit(i + j);
    if (b == 0) continue;
    const long double term = static_cast<long double>(b) * conv.lambda_kj(i, j);
    eps += (j % 2 == 0) ? term : -term;
  }
  return static_cast<double>(eps);
}

double epsilon_shift(const ContinuedFraction& alpha, std::int64_t n, std::size_t i,
                     std::int64_t t) {
  const OstrowskiExpansion e = ostrowski_expand(n, alpha);
  const Convergents conv(alpha, e.top_level());
  return epsilon_shift(conv, e, i, t);
}

DecomposeResult decompose_check(const ContinuedFraction& alpha, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("decomposition needs N >= 1");
  const OstrowskiExpansion e = ostrowski_expand(n, alpha);
  const Convergents conv(alpha, e.top_level());
  DecomposeResult out;
  const LogMagnitude lhs = sudler_log_product(alpha, n);
  CompensatedSum rhs_log;
  bool rhs_zero = false;
  for (std::size_t i = 0; i <= e.top_level(); ++i) {
    const std::int64_t b = e.digit(i);
    if (b == 0) continue;
    const PerturbedEvaluator level(alpha, i);
    for (std::int64_t t = 0; t < b; ++t) {
      const LogMagnitude f = level.log_value(epsilon_shift(conv, e, i, t));
      ++out.factors;
      if (f.zero)
        rhs_zero = true;
      else
        rhs_log.add(f.log_abs);
    }
  }
  out.lhs = lhs.value();
  out.rhs = rhs_zero ? 0.0 : std::exp(static_cast<double>(rhs_log.value()));
  if (lhs.zero || rhs_zero) {
    out.relative_error = (lhs.zero && rhs_zero) ? 0.0 : 1.0;
  } else {
    out.relative_error = std::fabs(std::expm1(static_cast<double>(rhs_log.value()) - lhs.log_abs));
  }
  return out;
}

// ---------------------------------------------------------------------------

HkEvaluator::HkEvaluator(const ContinuedFraction& alpha, std::size_t k, std::int64_t near_terms)
    : k_(k) {
  if (k < 1) throw std::invalid_argument("H_k needs k >= 1");
  const Convergents conv(alpha, k);
  const Integer qk_int = conv.q(k);
  if (qk_int >= (Integer{1} << 52)) throw std::overflow_error("q_k too large for H_k");
  const std::int64_t qk = static_cast<std::int64_t>(qk_int);
  const std::int64_t q1 = static_cast<std::int64_t>(conv.q(k - 1));
  lambda_ = conv.lambda(k);
  m_ = qk / 2;
  const double lam = lambda_;
  const double qd = static_cast<double>(qk);

  const std::int64_t near = std::min<std::int64_t>(near_terms, m_);
  near_a_.resize(static_cast<std::size_t>(near));
  for (std::int64_t n = 1; n <= near; ++n) {
    const std::int64_t res = static_cast<std::int64_t>((static_cast<Integer>(n) * q1) % qk);
    const double f = static_cast<double>(res) / qd;
    near_a_[static_cast<std::size_t>(n - 1)] = 1.0 - lam * (f - 0.5) / static_cast<double>(n);
  }

  far_moments_.assign(3, 0.0);
  if (m_ <= near) return;

  // Eight lanes n = near+1+l, near+1+l+8, ... carry independent residues so
  // the loop body is straight-line vector code.
  using V = double __attribute__((vector_size(64)));
  constexpr int L = 8;
  const std::int64_t count = m_ - near;
  const std::int64_t full = count / L;
  const V step = V{} + static_cast<double>((static_cast<Integer>(L) * q1) % qk);
  const V qv = V{} + qd;
  const V inv_q = V{} + 1.0 / qd;
  const V lamv = V{} + lam;
  V F, N;
  for (int l = 0; l < L; ++l) {
    const std::int64_t n = near + 1 + l;
    F[l] = static_cast<double>((static_cast<Integer>(n) * q1) % qk);
    N[l] = static_cast<double>(n);
  }
  CompensatedSum tot_log, tot_m1, tot_m2, tot_m3;
  constexpr std::int64_t kFlush = 2048;
  for (std::int64_t done = 0; done < full;) {
    const std::int64_t chunk = std::min(kFlush, full - done);
    V acc_log{}, acc_m1{}, acc_m2{}, acc_m3{};
    for (std::int64_t it = 0; it < chunk; ++it) {
      const V inv = 1.0 / N;
      const V y = lamv * (F * inv_q - 0.5) * inv;
      // -log(1 - y) to fifth order
      acc_log += y * (1.0 + y * (0.5 + y * (1.0 / 3.0 + y * (0.25 + 0.2 * y))));
      const V z = inv * (1.0 + y * (1.0 + y * (1.0 + y)));
      const V z2 = z * z;
      acc_m1 += z2;
      acc_m2 += z2 * z2;
      acc_m3 += z2 * z2 * z2;
      const V fn = F + step;
      F = fn >= qv ? fn - qv : fn;
      N += L;
    }
    for (int l = 0; l < L; ++l) {
      tot_log.add(acc_log[l]);
      tot_m1.add(acc_m1[l]);
      tot_m2.add(acc_m2[l]);
      tot_m3.add(acc_m3[l]);
    }
    done += chunk;
  }
  for (std::int64_t n = near + 1 + full * L; n <= m_; ++n) {
    const std::int64_t res = static_cast<std::int64_t>((static_cast<Integer>(n) * q1) % qk);
    const double a = 1.0 - lam * (static_cast<double>(res) / qd - 0.5) / static_cast<double>(n);
    tot_log.add(-std::log(a));
    const double z = 1.0 / (static_cast<double>(n) * a);
    tot_m1.add(z * z);
    tot_m2.add(std::pow(z, 4));
    tot_m3.add(std::pow(z, 6));
  }
  far_log_a2_ = static_cast<double>(-2.0L * tot_log.value());
  far_moments_ = {static_cast<double>(tot_m1.value()), static_cast<double>(tot_m2.value()),
                  static_cast<double>(tot_m3.value())};
}

double HkEvaluator::log_value(double eps) const {
  const double lin = 2.0 * kPi * std::fabs(eps + lambda_);
  if (lin == 0.0) return -INFINITY;
  const double u = eps + 0.5 * lambda_;
  const double u2 = u * u;
  CompensatedSum acc;
  acc.add(std::log(lin));
  for (std::size_t i = 0; i < near_a_.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double a = near_a_[i];
    const double h = std::fabs(a * a - u2 / (n * n));
    if (h == 0.0) return -INFINITY;
    acc.add(std::log(h));
  }
  acc.add(far_log_a2_);
  acc.add(-(u2 * far_moments_[0] + u2 * u2 * far_moments_[1] / 2.0 +
            u2 * u2 * u2 * far_moments_[2] / 3.0));
  return static_cast<double>(acc.value());
}

HkEvaluation HkEvaluator::operator()(double eps) const {
  return {k_, eps, std::exp(log_value(eps)), m_};
}

HkEvaluation H_limit(const ContinuedFraction& alpha, std::size_t k, double eps) {
  return HkEvaluator(alpha, k)(eps);
}

// ---------------------------------------------------------------------------

double ostrowski_sum(const ContinuedFraction& x, std::int64_t ell) {
  if (ell < 1) throw std::invalid_argument("Ostrowski sum needs l >= 1");
  const MultiplesOf mx(x);
  CompensatedSum acc;
  for (std::int64_t n = 1; n <= ell; ++n) acc.add(0.5L - static_cast<long double>(mx.at(n).frac));
  return static_cast<double>(acc.value());
}

LiminfResult empirical_liminf(const ContinuedFraction& alpha, std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("liminf needs N_max >= 1");
  LiminfResult out;
  out.digit_warning = alpha.max_digit() > 3;
  const Rotation rot(alpha);
  CompensatedSum acc;
  long double best = INFINITY;
  for (std::int64_t r = 1; r <= n_max; ++r) {
    const long double c = rot.centered(r);
    if (c == 0.0L) {
      out.min_value = 0.0;
      out.argmin = r;
      return out;
    }
    acc.add(std::log(2.0L * std::fabs(std::sin(kPiL * c))));
    const long double v = acc.value();
    if (v < best) {
      best = v;
      out.argmin = r;
    }
  }
  out.min_value = static_cast<double>(std::exp(best));
  return out;
}

}  // namespace sudler
