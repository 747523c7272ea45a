#pragma once

// Grid checks, unimodality, the universal perturbation inequalities and the
// declarative table of negative-perturbation cases, assembled into a report.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sudler/ffamily.hpp"
#include "sudler/pattern.hpp"

namespace sudler {

// ---- grid ---------------------------------------------------------------

constexpr int kGridSize = 2001;  // x_i = -1 + i/1000, i = 0..2000
inline double grid_point(int i) { return static_cast<double>(i - 1000) / 1000.0; }
/// Largest i with x_i <= x (clamped to 0..2000).
int grid_index_below(double x);
/// Smallest i with x_i >= x (clamped to 0..2000).
int grid_index_above(double x);

struct GridValues {
  int first = 0;               // grid index of values[0]
  std::vector<double> values;  // F(x_i) for the grid points inside ff's domain
};
GridValues grid_values(const FFunction& ff);

struct UnimodalResult {
  bool ok = false;
  int argmax = -1;  // grid index of the first maximal value
  int plateau = 0;  // number of grid points attaining the maximum
};

/// values[j] = F(x_{first + j}). Non-decreasing up to the maximum and
/// non-increasing after it, with the maximum at a positive grid point.
/// A flat maximum is tolerated up to two points.
UnimodalResult check_unimodal(std::span<const double> values, int first);

/// min(F(snap_down(lo)), F(snap_up(hi))) after intersecting [lo, hi] with
/// [eps_min, eps_max]. Throws std::domain_error if the intersection is empty.
double interval_lower_bound(const FFunction& ff, double lo, double hi);

// ---- W table and the family of all F_c ------------------------------------

struct WEntry {
  double W = 0;
  int restarts = 0;
};
using WTable = std::array<WEntry, kLeftWordCount>;

/// Runs W_algorithm for every left word not supplied by lookup.
/// computed, if given, receives the indices that were computed here.
WTable compute_w_table(const FParams& params, int jobs,
                       const std::function<std::optional<WEntry>(std::size_t)>& lookup = {},
                       std::vector<std::size_t>* computed = nullptr);

class FamilyTable {
 public:
  FamilyTable(const FParams& params, const WTable& w, int jobs = 0);
  const FFunction& operator[](const Pattern& c) const { return all_[c.index()]; }
  const FFunction& at(std::size_t index) const { return all_.at(index); }
  const FParams& params() const noexcept { return params_; }
  const WTable& w_table() const noexcept { return w_; }

 private:
  FParams params_;
  WTable w_;
  std::vector<FFunction> all_;
};

// ---- case table -----------------------------------------------------------

/// constant + scale * x, where x is a_{k+index} (digit 'a') or b_{k+index}
/// (digit 'b'); digit 0 means a plain constant.
struct Coefficient {
  double constant = 0;
  char digit = 0;
  int index = 0;
  double scale = 0;

  Coefficient() = default;
  Coefficient(double c) : constant(c) {}  // NOLINT: implicit on purpose
  Coefficient(double c, char d, int i, double s) : constant(c), digit(d), index(i), scale(s) {}
};

/// coef * q_{k+s} delta_{k+j}, with s the shift of the enclosing factor.
struct ChainTerm {
  Coefficient coef;
  int j = 0;
};
using Chain = std::vector<ChainTerm>;

enum class FactorKind { Interval, UniversalT0, UniversalT1 };

struct FactorSpec {
  FactorKind kind = FactorKind::Interval;
  int shift = 0;  // F at the pattern c_{k+shift}, minimised over completions
  int t = 0;      // counter of eps_{k+shift,t}; informational
  Chain lower;    // empty chain = 0
  Chain upper;
  Coefficient power = 1.0;  // universal factors only
  int lambda_shift = -1;    // take the lambdas from c_{k+lambda_shift} instead; -1 = shift
};

enum class Parity { Any, Odd, Even };

struct DigitCondition {
  int level;  // b_{k+level}
  int lo, hi;
};

struct CaseSpec {
  std::string id;
  std::vector<DigitCondition> digits;
  Parity parity = Parity::Any;  // of the least r > 5 with b_{k+r} >= 1
  std::vector<FactorSpec> factors;
  std::vector<std::vector<int>> combination;  // max over products of factors
  double target = 0;
  std::vector<FactorSpec> printed;  // literal reading of the printed bound, if it differs
};

const std::vector<CaseSpec>& case_table();

/// Digits around a level k with b_k > 0: b[i] = b_{k+i}, a[i] = a_{k+i}.
struct DigitState {
  std::array<int, 7> b{};
  std::array<int, 8> a{};
  Parity rpar = Parity::Odd;  // no further digit counts as odd
};

/// Every legal state whose a_{k+1..k+5} are (c_5, ..., c_9) of c.
std::vector<DigitState> legal_digit_states(const Pattern& c);
bool case_applies(const CaseSpec& spec, const DigitState& s);

/// Lambda bound of a chain for pattern cp, shift s; lower picks lambda_min for
/// positive and lambda_max for negative coefficients, upper the reverse.
double chain_bound(const Chain& chain, int s, const PatternBounds& bp, const Pattern& c,
                   std::span<const int> b, bool lower);

struct UniversalValues {
  double t0 = 0;  // min over c of min(F(0), F(lambda_{c,1}^max))
  double t1 = 0;
  double t2 = 0;
};
UniversalValues universal_values(const FamilyTable& fam);

struct CaseOutcome {
  bool eligible = false;
  double value = 0;    // the max(...) combination, minimised over completions and b
  std::string detail;  // per-factor intervals and bounds
};

CaseOutcome verify_case(const CaseSpec& spec, const Pattern& c, const FamilyTable& fam,
                        const UniversalValues& u, bool printed_reading = false);

// ---- full run and report ---------------------------------------------------

constexpr double kSafety = 1e-6;
constexpr double kProductBound = 1.0001;
constexpr double kTranscriptionSlack = 5e-3;

struct Check {
  std::string name;
  double value = 0;
  double threshold = 0;
  std::string witness;
  bool required = true;
  bool pass = false;
  friend bool operator==(const Check&, const Check&) = default;
};

struct CaseResult {
  std::string id;
  double target = 0;
  double value = 0;
  std::string witness_pattern;
  std::string witness_detail;
  std::size_t eligible_patterns = 0;
  bool required = true;
  bool pass = false;  // value > 1.0001 and value >= target - 5e-3
  std::optional<double> printed_value;
  friend bool operator==(const CaseResult&, const CaseResult&) = default;
};

struct PatternResult {
  std::string pattern;
  double F0 = 0, F_negpert = 0, F_posmax = 0;
  double t0 = 0;
  std::optional<double> t1, t2;
  bool unimodal = false;
  int argmax = -1, plateau = 0;
  double W = 0;
  int restarts = 0;
  friend bool operator==(const PatternResult&, const PatternResult&) = default;
};

struct VerificationReport {
  FParams params;
  bool smoke = false;
  std::size_t pattern_count = 0;
  bool pass = false;
  std::vector<Check> checks;
  std::vector<CaseResult> cases;
  std::vector<std::string> unimodality_failures;
  std::vector<std::string> plateau_flags;
  std::map<int, int> restart_histogram;
  std::vector<PatternResult> patterns;
  double wall_time_seconds = 0;
};

struct RunOptions {
  FParams params = kFullParams;
  int jobs = 0;                       // 0 = hardware concurrency
  std::vector<Pattern> patterns;      // empty = all 19,683
  bool smoke = false;                 // only F(0) > 1.0 decides the status
  std::optional<WTable> w_table;      // precomputed (e.g. from a cache)
  std::map<std::string, double> threshold_overrides;  // by check name
};

/// 200 patterns spread evenly over the lexicographic order.
std::vector<Pattern> smoke_sample();

VerificationReport run_full(const RunOptions& options);

/// Sorted-key JSON; wall time optional so that reports can be compared.
std::string report_to_json(const VerificationReport& r, bool with_patterns = true,
                           bool with_time = true);
VerificationReport report_from_json(std::string_view text);

}  // namespace sudler
