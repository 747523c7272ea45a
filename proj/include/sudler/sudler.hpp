#pragma once

// Sudler products P_N(alpha) = prod_{r=1}^N 2|sin(pi r alpha)|, their perturbed
// versions at convergent denominators, the decomposition along the Ostrowski
// expansion, and the limit functions H_k.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sudler/contfrac.hpp"

namespace sudler {

/// Exact reduction of r*alpha modulo 1.
///
/// alpha is replaced by p_K/q_K + eta with q_K < 2^62, so the residue of
/// r*p_K mod q_K is exact and only the tiny drift r*eta is floating point.
class Rotation {
 public:
  explicit Rotation(const ContinuedFraction& alpha);

  /// r*alpha minus the nearest integer, in [-1/2, 1/2].
  long double centered(std::int64_t r) const;
  /// {r*alpha} in [0, 1).
  long double frac(std::int64_t r) const;

  std::int64_t modulus() const noexcept { return q_; }
  std::int64_t multiplier() const noexcept { return p_; }
  long double drift() const noexcept { return eta_; }

 private:
  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
  long double eta_ = 0.0L;
};

/// log|P| with a separate zero flag.
struct LogMagnitude {
  double log_abs = 0.0;
  bool zero = false;
  double value() const;
};

LogMagnitude sudler_log_product(const ContinuedFraction& alpha, std::int64_t n);
double sudler_product(const ContinuedFraction& alpha, std::int64_t n);

/// Evaluator for P_{q_n}(alpha, eps) at a fixed level n.
///
/// Small q_n are evaluated factor by factor. Large q_n are evaluated by
/// climbing the levels: P_{q_j}(eps) factors exactly into a_j copies of
/// P_{q_{j-1}} and one copy of P_{q_{j-2}} at rescaled arguments, and every
/// level is stored as a Chebyshev interpolant on [-R, R].
class PerturbedEvaluator {
 public:
  struct Options {
    std::int64_t direct_limit = 200000;  // q_n up to this is evaluated directly
    std::int64_t base_limit = 50000;     // largest q used for the base levels
    int degree = 96;
  };

  PerturbedEvaluator(const ContinuedFraction& alpha, std::size_t n);
  PerturbedEvaluator(const ContinuedFraction& alpha, std::size_t n, Options options);
  ~PerturbedEvaluator();
  PerturbedEvaluator(PerturbedEvaluator&&) noexcept;
  PerturbedEvaluator& operator=(PerturbedEvaluator&&) noexcept;

  double operator()(double eps) const;
  LogMagnitude log_value(double eps) const;

  bool is_direct() const noexcept;
  /// Radius of the interpolation interval (0 in direct mode).
  double radius() const noexcept;
  std::size_t level() const noexcept { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t n_;
};

double perturbed_product(const ContinuedFraction& alpha, std::size_t n, double eps);

/// eps_{i,t}(N) = t*lambda_i + sum_{j>=1} (-1)^j b_{i+j} lambda_{i,j}.
double epsilon_shift(const Convergents& conv, const OstrowskiExpansion& expansion,
                     std::size_t i, std::int64_t t);
double epsilon_shift(const ContinuedFraction& alpha, std::int64_t n, std::size_t i,
                     std::int64_t t);

struct DecomposeResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
  std::size_t factors = 0;
};

/// Compares P_N(alpha) with the product of perturbed factors over the
/// nonzero Ostrowski digits of N.
DecomposeResult decompose_check(const ContinuedFraction& alpha, std::int64_t n);

struct HkEvaluation {
  std::size_t k = 0;
  double epsilon = 0.0;
  double value = 0.0;
  std::int64_t truncation = 0;  // floor(q_k / 2)
};

/// H_k(alpha, eps) for many eps at one k.
///
/// The fractional parts {n q_{k-1}/q_k} are exact residues. Factors with
/// n <= near_terms are multiplied out for every eps; for the remaining
/// factors the eps-dependence enters only through u = eps + lambda_k/2, and
/// log|A_n^2 - u^2/n^2| is expanded in powers of u^2/(n A_n)^2 whose
/// coefficients are summed once.
class HkEvaluator {
 public:
  HkEvaluator(const ContinuedFraction& alpha, std::size_t k, std::int64_t near_terms = 4096);

  HkEvaluation operator()(double eps) const;
  double log_value(double eps) const;

  double lambda() const noexcept { return lambda_; }
  std::int64_t truncation() const noexcept { return m_; }

 private:
  std::size_t k_;
  double lambda_;
  std::int64_t m_;
  std::vector<double> near_a_;   // A_n for n <= near_terms
  double far_log_a2_ = 0.0;      // sum_{n > near} log A_n^2
  std::vector<double> far_moments_;  // sum_{n > near} (n A_n)^{-2j}, j = 1..
};

HkEvaluation H_limit(const ContinuedFraction& alpha, std::size_t k, double eps);

/// S_l(x) = sum_{n=1}^{l} (1/2 - {n x}).
double ostrowski_sum(const ContinuedFraction& x, std::int64_t ell);

struct LiminfResult {
  double min_value = 0.0;
  std::int64_t argmin = 0;
  bool digit_warning = false;  // some partial quotient exceeds 3
};

/// min over 1 <= N <= n_max of P_N(alpha).
LiminfResult empirical_liminf(const ContinuedFraction& alpha, std::int64_t n_max);

}  // namespace sudler
