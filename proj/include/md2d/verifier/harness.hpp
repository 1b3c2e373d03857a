#pragma once

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "md2d/error.hpp"
#include "md2d/rng.hpp"

namespace md2d::verify {

/// One evaluated inequality: lhs <= C rhs.
struct Sample {
  double lhs = 0.0;
  double rhs = 0.0;
  std::string tag = {};
  bool skip = false;
};

enum class Phase { calibrate, assert };

inline const char* phase_name(Phase p) { return p == Phase::calibrate ? "calibrate" : "assert"; }

struct EvidenceRow {
  std::string check;
  Phase phase = Phase::assert;
  std::uint64_t id = 0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  std::string tag;
  bool violation = false;
};

/// Receives the evidence rows of one check at a time.
using RowSink = std::function<void(const std::vector<EvidenceRow>&)>;

/// How a check turns samples into a verdict.
enum class Mode {
  calibrated,  // assert max ratio <= margin * calibration max
  absolute,    // assert every ratio <= 1 (bound carries an explicit constant)
  range,       // assert every ratio in [lo, hi]
};

struct CheckResult {
  std::string name;
  Mode mode = Mode::calibrated;
  long trials = 0;
  long skipped = 0;
  double calibration_max = 0.0;
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  long violations = 0;
  bool pass = false;
  std::map<std::string, double> info;
};

struct LemmaReport {
  std::string lemma;
  long trials = 0;
  std::vector<CheckResult> checks;
  std::map<std::string, double> slope_estimates;
  std::vector<EvidenceRow> failures;  // violating rows, capped at kMaxFailures
  std::string note;
  bool pass = true;

  static constexpr std::size_t kMaxFailures = 1000;

  double max_ratio() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.max_ratio);
    return m;
  }
  void add(CheckResult c) {
    pass = pass && c.pass;
    checks.push_back(std::move(c));
  }
  /// Adds a check, keeps its violating rows and hands all rows to the sink.
  void add(CheckResult c, const std::vector<EvidenceRow>& rows, const RowSink& sink) {
    for (const auto& r : rows)
      if (r.violation && failures.size() < kMaxFailures) failures.push_back(r);
    if (sink) sink(rows);
    add(std::move(c));
  }
};

struct VerifierConfig {
  std::uint64_t seed = 20240607;
  long trials = 100000;
  double margin = 1.05;
  int max_dyadic_exponent = 6;
  /// Multiplies every calibrated constant; values < 1 force failures (harness self-test).
  double constant_scale = 1.0;
};

/// ratio = lhs / rhs with 0/0 = 0 and x/0 = inf.
inline double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs <= 1e-13 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// FNV-1a; stream ids derived from check names so each check owns its seed streams.
inline std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t stream_id(std::string_view name, Phase p) {
  return (name_hash(name) << 1) | (p == Phase::assert ? 1u : 0u);
}

/// Worker cap from MD2D_THREADS; 0 means no cap.
inline int thread_cap() {
  const char* v = std::getenv("MD2D_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("MD2D_THREADS must be a positive integer");
  return static_cast<int>(n);
}

/// Installs the MD2D_THREADS cap for the lifetime of the object.
class ThreadLimit {
 public:
  ThreadLimit() {
    if (const int n = thread_cap(); n > 0)
      ctl_ = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, n);
  }

 private:
  std::unique_ptr<tbb::global_control> ctl_;
};

using SampleFn = std::function<Sample(std::mt19937_64& g, std::uint64_t id)>;

/// Evaluates trials [0, n) of one stream in parallel; trial i always sees trial_rng(seed, stream, i).
inline std::vector<Sample> run_stream(const SampleFn& fn, std::uint64_t seed, std::uint64_t stream, long n) {
  std::vector<Sample> out(static_cast<std::size_t>(n));
  tbb::parallel_for(tbb::blocked_range<long>(0, n), [&](const tbb::blocked_range<long>& r) {
    for (long i = r.begin(); i != r.end(); ++i) {
      auto g = trial_rng(seed, stream, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = fn(g, static_cast<std::uint64_t>(i));
    }
  });
  return out;
}

struct CheckSpec {
  std::string name;
  SampleFn fn;
  Mode mode = Mode::calibrated;
  bool two_sided = false;  // ratio r enters as max(r, 1/r)
  double lo = 0.0, hi = 1.0;  // Mode::range
};

namespace detail {

inline double effective_ratio(const Sample& s, bool two_sided) {
  const double r = safe_ratio(s.lhs, s.rhs);
  if (!two_sided) return r;
  if (r == 0.0 || std::isinf(r)) return std::numeric_limits<double>::infinity();
  return std::max(r, 1.0 / r);
}

/// Serial reduction in index order so results do not depend on scheduling.
inline void reduce(const std::vector<Sample>& s, const CheckSpec& spec, Phase ph, std::vector<EvidenceRow>* rows,
                   double& max_r, double& min_r, long& skipped,
                   std::map<std::string, double>& tag_max) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].skip) {
      ++skipped;
      continue;
    }
    const double r = effective_ratio(s[i], spec.two_sided);
    max_r = std::max(max_r, r);
    min_r = std::min(min_r, r);
    if (!s[i].tag.empty()) {
      auto& m = tag_max[s[i].tag];
      m = std::max(m, r);
    }
    if (rows) rows->push_back({spec.name, ph, i, s[i].lhs, s[i].rhs, r, s[i].tag});
  }
}

}  // namespace detail

/// Calibrate on one seed stream, assert on a disjoint one.
inline CheckResult run_check(const CheckSpec& spec, const VerifierConfig& cfg, std::vector<EvidenceRow>* rows) {
  if (cfg.trials < 1) throw UsageError("run_check: trials must be positive");
  CheckResult res;
  res.name = spec.name;
  res.mode = spec.mode;
  res.trials = cfg.trials;
  const std::size_t first_row = rows ? rows->size() : 0;

  double cmax = 0.0, cmin = std::numeric_limits<double>::infinity();
  long cskip = 0;
  std::map<std::string, double> ctags;
  const auto cal = run_stream(spec.fn, cfg.seed, stream_id(spec.name, Phase::calibrate), cfg.trials);
  detail::reduce(cal, spec, Phase::calibrate, rows, cmax, cmin, cskip, ctags);

  long askip = 0;
  std::map<std::string, double> atags;
  const auto as = run_stream(spec.fn, cfg.seed, stream_id(spec.name, Phase::assert), cfg.trials);
  double amax = 0.0, amin = std::numeric_limits<double>::infinity();
  detail::reduce(as, spec, Phase::assert, rows, amax, amin, askip, atags);

  res.calibration_max = cmax;
  res.max_ratio = amax;
  res.min_ratio = amin;
  res.skipped = askip;
  for (const auto& [t, v] : atags) res.info["max_ratio[" + t + "]"] = v;

  const bool finite = std::isfinite(amax) && std::isfinite(cmax);
  switch (spec.mode) {
    case Mode::calibrated: {
      const double limit = cfg.margin * cmax * cfg.constant_scale;
      for (const auto& s : as)
        if (!s.skip && !(detail::effective_ratio(s, spec.two_sided) <= limit)) ++res.violations;
      res.info["limit"] = limit;
      break;
    }
    case Mode::absolute: {
      const double limit = cfg.constant_scale;
      for (const auto* batch : {&cal, &as})
        for (const auto& s : *batch)
          if (!s.skip && !(detail::effective_ratio(s, spec.two_sided) <= limit * (1.0 + 1e-12))) ++res.violations;
      res.info["limit"] = limit;
      res.max_ratio = std::max(amax, cmax);
      res.min_ratio = std::min(amin, cmin);
      break;
    }
    case Mode::range: {
      for (const auto* batch : {&cal, &as})
        for (const auto& s : *batch) {
          if (s.skip) continue;
          const double r = detail::effective_ratio(s, spec.two_sided);
          if (!(r >= spec.lo && r <= spec.hi * cfg.constant_scale)) ++res.violations;
        }
      res.info["lo"] = spec.lo;
      res.info["hi"] = spec.hi * cfg.constant_scale;
      res.max_ratio = std::max(amax, cmax);
      res.min_ratio = std::min(amin, cmin);
      break;
    }
  }
  res.pass = finite && res.violations == 0 && res.skipped < res.trials;
  if (rows) {
    const double lo = spec.mode == Mode::range ? spec.lo : -std::numeric_limits<double>::infinity();
    const double hi = spec.mode == Mode::range ? spec.hi * cfg.constant_scale
                      : spec.mode == Mode::absolute ? cfg.constant_scale * (1.0 + 1e-12)
                                                    : cfg.margin * cmax * cfg.constant_scale;
    for (std::size_t i = first_row; i < rows->size(); ++i) {
      auto& r = (*rows)[i];
      if (spec.mode == Mode::calibrated && r.phase == Phase::calibrate) continue;
      r.violation = !(r.ratio >= lo && r.ratio <= hi);
    }
  }
  return res;
}

/// Runs checks in order as one lemma report.
inline LemmaReport run_checks(const std::string& lemma, const std::vector<CheckSpec>& specs, const VerifierConfig& cfg,
                              const RowSink& sink = {}) {
  LemmaReport rep;
  rep.lemma = lemma;
  rep.trials = cfg.trials;
  for (const auto& spec : specs) {
    std::vector<EvidenceRow> rows;
    CheckResult c = run_check(spec, cfg, &rows);
    rep.add(std::move(c), rows, sink);
  }
  return rep;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw NumericsError("loglog_slope: nonpositive value");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace md2d::verify
