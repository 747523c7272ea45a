#include "sudler/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sudler/contfrac.hpp"
#include "sudler/ffamily.hpp"
#include "sudler/pattern.hpp"
#include "sudler/sudler.hpp"
#include "sudler/verify.hpp"
#include "sudler/wcache.hpp"

namespace sudler {

namespace {

// shortest round-trip form, independent of the locale
std::string num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fixed3(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "lo:hi:step", inclusive, computed as lo + i*step
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? spec.find(':', pos) : spec.size();
    if (end == std::string::npos) throw UsageError("grid must be lo:hi:step");
    const std::string tok = spec.substr(pos, end - pos);
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw UsageError("bad number '" + tok + "' in grid");
    parts.push_back(v);
    pos = end + 1;
  }
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0) || hi < lo) throw UsageError("grid needs lo <= hi and step > 0");
  std::vector<double> g;
  for (long i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + step * 1e-9) break;
    g.push_back(x);
    if (g.size() > 10'000'000) throw UsageError("grid too large");
  }
  return g;
}

std::vector<double> epsilons(const std::vector<double>& eps, const std::string& grid) {
  if (!grid.empty()) return parse_grid(grid);
  if (eps.empty()) throw UsageError("give --eps or --grid");
  return eps;
}

std::vector<Pattern> parse_pattern_list(const std::string& list) {
  std::vector<Pattern> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(Pattern::parse(tok));
  }
  if (out.empty()) throw UsageError("empty pattern list");
  return out;
}

std::unique_ptr<WCache> open_cache(const std::string& flag, bool disabled) {
  if (disabled) return nullptr;
  std::string dir = flag;
  if (dir.empty()) {
    if (const char* env = std::getenv("SUDLER_CACHE_DIR")) dir = env;
  }
  if (dir.empty()) return nullptr;
  return std::make_unique<WCache>(dir);
}

struct ParamFlags {
  int n0 = 0, T = 0, m = 0;  // 0 = preset
  void add(CLI::App* app) {
    app->add_option("--n0", n0, "number of explicit factors");
    app->add_option("--T", T, "truncation of the tail series");
    app->add_option("--m", m, "maximal word length of the W subdivision");
  }
  FParams resolve(const FParams& preset) const {
    FParams p = preset;
    if (n0) p.n0 = n0;
    if (T) p.T = T;
    if (m) p.m = m;
    p.validate();
    return p;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sudler products and the verification of the F_c lower bounds", "sudler"};
  app.require_subcommand(1);

  // eval
  std::string alpha;
  std::int64_t N = 0, from = 0, to = 0;
  auto* eval = app.add_subcommand("eval", "P_N(alpha) as index,value CSV");
  eval->add_option("--alpha", alpha, "continued fraction, e.g. [0;(1)]")->required();
  eval->add_option("--N", N, "single N");
  eval->add_option("--from", from, "first N of a range");
  eval->add_option("--to", to, "last N of a range");

  // perturbed
  std::size_t level = 0;
  std::vector<double> eps;
  std::string grid;
  auto* pert = app.add_subcommand("perturbed", "P_{q_n}(alpha, eps) as epsilon,value CSV");
  pert->add_option("--alpha", alpha)->required();
  pert->add_option("--n", level, "level of the denominator q_n")->required();
  pert->add_option("--eps", eps, "perturbations")->delimiter(',');
  pert->add_option("--grid", grid, "lo:hi:step");

  // hk
  auto* hk = app.add_subcommand("hk", "H_k(alpha, eps) as epsilon,value CSV");
  hk->add_option("--alpha", alpha)->required();
  hk->add_option("--k", level, "level")->required();
  hk->add_option("--eps", eps)->delimiter(',');
  hk->add_option("--grid", grid, "lo:hi:step");

  // decompose-check
  auto* dec = app.add_subcommand("decompose-check", "P_N against its Ostrowski decomposition");
  dec->add_option("--alpha", alpha)->required();
  dec->add_option("--N", N)->required();

  // fc-table
  std::string pattern_text, out_format = "csv", out_file, cache_dir;
  bool no_cache = false;
  int jobs = 0;
  ParamFlags pf;
  auto* fct = app.add_subcommand("fc-table", "F_c on the grid points inside its domain");
  fct->add_option("--pattern", pattern_text, "9 digits")->required();
  fct->add_option("--out", out_format, "output format")->check(CLI::IsMember({"csv"}));
  fct->add_option("--file", out_file, "write to this file instead of stdout");
  fct->add_option("--cache", cache_dir, "W cache directory (default $SUDLER_CACHE_DIR)");
  fct->add_flag("--no-cache", no_cache);
  pf.add(fct);

  // wtable
  auto* wt = app.add_subcommand("wtable", "W for all 81 left words as CSV");
  wt->add_option("--jobs", jobs);
  wt->add_option("--cache", cache_dir);
  wt->add_flag("--no-cache", no_cache);
  wt->add_option("--out", out_file, "CSV file (default stdout)");
  pf.add(wt);

  // verify
  std::string patterns_list, report_file;
  bool smoke = false, no_timing = false, no_pattern_data = false;
  auto* ver = app.add_subcommand("verify", "run every check and write the certificate report");
  pf.add(ver);
  ver->add_option("--patterns", patterns_list, "comma separated patterns (default all)");
  ver->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  ver->add_option("--cache", cache_dir, "W cache directory (default $SUDLER_CACHE_DIR)");
  ver->add_flag("--no-cache", no_cache);
  ver->add_option("--out", report_file, "report file (default stdout)");
  ver->add_flag("--smoke", smoke, "(20,2000,12) on 200 sample patterns, F_c(0) > 1.0 only");
  ver->add_flag("--no-timing", no_timing, "omit wall_time_seconds from the report");
  ver->add_flag("--no-pattern-data", no_pattern_data, "omit the per-pattern records");

  // liminf
  std::int64_t n_max = 100000;
  auto* lim = app.add_subcommand("liminf", "min of P_N(alpha) over N <= N-max");
  lim->add_option("--alpha", alpha)->required();
  lim->add_option("--N-max", n_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "sudler: " << e.what() << "\n";
    err << "run 'sudler --help' for usage\n";
    return 2;
  }

  try {
    if (eval->parsed()) {
      const auto cf = parse_cf(alpha);
      std::vector<std::int64_t> ns;
      if (eval->count("--N")) ns.push_back(N);
      if (eval->count("--from") || eval->count("--to")) {
        if (!eval->count("--from") || !eval->count("--to") || from < 0 || to < from)
          throw UsageError("--from/--to need 0 <= from <= to");
        for (std::int64_t n = from; n <= to; ++n) ns.push_back(n);
      }
      if (ns.empty()) throw UsageError("give --N or --from/--to");
      out << "index,value\n";
      for (auto n : ns) out << n << "," << num(sudler_product(cf, n)) << "\n";
      return 0;
    }
    if (pert->parsed()) {
      const auto cf = parse_cf(alpha);
      const auto xs = epsilons(eps, grid);
      PerturbedEvaluator ev(cf, level);
      out << "epsilon,value\n";
      for (double x : xs) out << num(x) << "," << num(ev(x)) << "\n";
      return 0;
    }
    if (hk->parsed()) {
      const auto cf = parse_cf(alpha);
      const auto xs = epsilons(eps, grid);
      HkEvaluator ev(cf, level);
      out << "epsilon,value\n";
      for (double x : xs) out << num(x) << "," << num(ev(x).value) << "\n";
      return 0;
    }
    if (dec->parsed()) {
      const auto r = decompose_check(parse_cf(alpha), N);
      out << "lhs," << num(r.lhs) << "\n"
          << "rhs," << num(r.rhs) << "\n"
          << "relative_error," << num(r.relative_error) << "\n"
          << "factors," << r.factors << "\n";
      return 0;
    }
    if (fct->parsed()) {
      const Pattern c = Pattern::parse(pattern_text);
      const FParams params = pf.resolve(kFullParams);
      auto cache = open_cache(cache_dir, no_cache);
      std::vector<std::string> warnings;
      WEntry w;
      std::optional<WCacheEntry> hit;
      if (cache) hit = cache->get(c, params);
      if (hit) {
        w = {hit->W, hit->restarts};
      } else {
        const auto r = W_algorithm(c, params);
        w = {r.W, r.restarts};
        if (cache)
          cache->put(WCacheEntry{representative_pattern(left_word_index(c)), params.n0, params.T,
                                 params.m, w.W, w.restarts, ""});
      }
      const FFunction f(c, params, w.W, w.restarts);
      std::vector<double> g(kGridSize);
      for (int i = 0; i < kGridSize; ++i) g[static_cast<std::size_t>(i)] = grid_point(i);
      std::ostringstream csv;
      csv << "epsilon,value\n";
      for (const auto& row : F_table(f, g))
        if (row.value) csv << fixed3(row.epsilon) << "," << num(*row.value) << "\n";
      if (out_file.empty())
        out << csv.str();
      else
        write_text(out_file, csv.str());
      return 0;
    }
    if (wt->parsed()) {
      const FParams params = pf.resolve(kFullParams);
      auto cache = open_cache(cache_dir, no_cache);
      std::vector<std::string> warnings;
      const WTable w = cached_w_table(params, jobs, cache.get(), nullptr, &warnings);
      for (const auto& msg : warnings) err << "warning: " << msg << "\n";
      std::ostringstream csv;
      csv << "left_word,W,restarts\n";
      for (std::size_t i = 0; i < kLeftWordCount; ++i)
        csv << representative_pattern(i).substr(0, 4) << "," << num(w[i].W) << ","
            << w[i].restarts << "\n";
      if (out_file.empty())
        out << csv.str();
      else
        write_text(out_file, csv.str());
      return 0;
    }
    if (ver->parsed()) {
      RunOptions opt;
      opt.smoke = smoke;
      opt.jobs = jobs;
      opt.params = pf.resolve(smoke ? kSmokeParams : kFullParams);
      if (!patterns_list.empty())
        opt.patterns = parse_pattern_list(patterns_list);
      else if (smoke)
        opt.patterns = smoke_sample();
      auto cache = open_cache(cache_dir, no_cache);
      std::vector<std::string> warnings;
      std::size_t hits = 0;
      opt.w_table = cached_w_table(opt.params, jobs, cache.get(), &hits, &warnings);
      for (const auto& msg : warnings) err << "warning: " << msg << "\n";
      if (cache) err << "W cache: " << hits << " of " << kLeftWordCount << " roots reused\n";

      const VerificationReport rep = run_full(opt);
      const std::string json = report_to_json(rep, !no_pattern_data, !no_timing);
      if (report_file.empty()) {
        out << json << "\n";
      } else {
        write_text(report_file, json + "\n");
      }
      for (const auto& ch : rep.checks)
        if (ch.required && !ch.pass)
          err << "FAIL " << ch.name << ": " << num(ch.value) << " <= " << num(ch.threshold)
              << " at " << ch.witness << "\n";
      for (const auto& cr : rep.cases)
        if (cr.required && !cr.pass)
          err << "FAIL case " << cr.id << ": " << num(cr.value) << " (target " << num(cr.target)
              << ") at " << cr.witness_pattern << "\n";
      if (!rep.smoke && !rep.unimodality_failures.empty())
        err << "FAIL unimodality: " << rep.unimodality_failures.size() << " patterns\n";
      err << (rep.pass ? "PASS" : "FAIL") << "\n";
      return rep.pass ? 0 : 1;
    }
    if (lim->parsed()) {
      const auto r = empirical_liminf(parse_cf(alpha), n_max);
      out << "min_value," << num(r.min_value) << "\n"
          << "argmin," << r.argmin << "\n"
          << "digit_warning," << (r.digit_warning ? "true" : "false") << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "sudler: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "sudler: cannot parse continued fraction: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "sudler: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace sudler
