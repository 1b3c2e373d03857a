#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "md2d/evolution.hpp"

namespace md2d {

// ---------------------------------------------------------------------------
// Local time from the norm equation T^{1/2} [1 + D~_T(0)] = eps / 2

using DataNormFn = std::function<double(double)>;

struct SolveTResult {
  double T = 0.0;
  double residual = 0.0;  // |T^{1/2}[1 + D~_T] - eps/2|
  double D = 0.0;         // D~_T at the returned T
  int evaluations = 0;
  bool capped = false;  // g(1) <= 0, T = 1 returned
};

struct SolveTOptions {
  int max_halvings = 80;
  int max_bisections = 200;
  double rel_tol = 1e-6;  // on |g| / eps
};

/// Dyadic scan from T = 1 downward for the largest T = 2^-k with g(T) <= 0, then bisection
/// on [2^-k, 2^-k+1].  The bracket keeps g <= 0 on its left end.
inline SolveTResult solve_T_report(double eps, const DataNormFn& D, const SolveTOptions& o = {}) {
  if (!(eps > 0.0)) throw UsageError("solve_T: epsilon must be positive");
  SolveTResult r;
  auto g = [&](double T) {
    ++r.evaluations;
    const double d = D(T);
    if (!std::isfinite(d) || d < 0.0) throw NumericsError("solve_T: data norm is not a finite nonnegative value");
    return std::sqrt(T) * (1.0 + d) - 0.5 * eps;
  };
  const double tol = o.rel_tol * eps;
  double hi = 1.0;
  double ghi = g(hi);
  if (ghi <= 0.0) {
    r.T = 1.0;
    r.D = D(1.0);
    r.residual = std::abs(ghi);
    r.capped = true;
    return r;
  }
  double lo = 0.5, glo = g(lo);
  int k = 1;
  while (glo > 0.0) {
    if (++k > o.max_halvings) throw NumericsError("solve_T: no admissible T, data too large for the scan floor");
    hi = lo;
    ghi = glo;
    lo *= 0.5;
    glo = g(lo);
  }
  double best = lo, gbest = glo;
  for (int it = 0; it < o.max_bisections && std::abs(gbest) > 0.01 * tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (std::abs(gm) < std::abs(gbest)) {
      best = mid;
      gbest = gm;
    }
    if (gm <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  r.T = best;
  r.residual = std::abs(gbest);
  r.D = D(best);
  return r;
}

inline double solve_T(double eps, const DataNormFn& D) { return solve_T_report(eps, D).T; }

/// T -> D~_T of the electromagnetic part of a state.
inline DataNormFn state_norm_fn(const CoupledState& s) {
  auto split = std::make_shared<const EMSplit>(em_split_of(s));
  return [split](double T) { return data_norm_DT(*split, T).tildeD_T; };
}

inline double Tj_residual(double eps, double T, double D) { return std::abs(std::sqrt(T) * (1.0 + D) - 0.5 * eps); }

// ---------------------------------------------------------------------------
// Growth certificate

struct GrowthCertificate {
  double T = 0.0;
  double D0 = 0.0;
  double sup = 0.0;
  double C_fit = 0.0;
  bool finite = true;
};

/// C_fit = [sup_t D~_T(t) - D~_T(0)] / (T^{1/2} log(1/T)) over the rows of a trajectory whose
/// norm columns were computed at this T.
inline GrowthCertificate growth_certificate(const Trajectory& tr, double T) {
  if (!(T > 0.0 && T < 1.0)) throw UsageError("growth_certificate: T must lie in (0, 1)");
  if (tr.rows.empty()) throw UsageError("growth_certificate: empty trajectory");
  if (std::abs(tr.norm_T - T) > 1e-12 * T) throw UsageError("growth_certificate: trajectory norms use another T");
  GrowthCertificate c;
  c.T = T;
  c.D0 = tr.rows.front().tildeD_T;
  c.sup = c.D0;
  for (const auto& r : tr.rows) c.sup = std::max(c.sup, r.tildeD_T);
  c.C_fit = (c.sup - c.D0) / (std::sqrt(T) * std::log(1.0 / T));
  c.finite = std::isfinite(c.C_fit);
  return c;
}

struct GrowthSweep {
  std::vector<GrowthCertificate> rows;
  double spread = 1.0;  // max C_fit / min C_fit over positive values
};

/// Runs [0, T] from the same state for every T, with at least min_steps steps per run.
inline GrowthSweep growth_sweep(const CoupledState& init, const std::vector<double>& Ts, double dt,
                                int min_steps = 8) {
  GrowthSweep out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double T : Ts) {
    IntervalOptions o;
    o.norm_T = T;
    const double h = std::min(dt, T / min_steps);
    const GrowthCertificate c = growth_certificate(solve_interval(init, T, h, o), T);
    out.rows.push_back(c);
    if (c.C_fit > 0.0) {
      lo = std::min(lo, c.C_fit);
      hi = std::max(hi, c.C_fit);
    }
  }
  out.spread = hi > 0.0 ? hi / lo : 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// First iteration and the global schedule

struct RunConfig {
  double dt = 1.0 / 256;
  int max_windows = 64;   // cap on n when the stop rule never fires
  int min_steps = 1;      // integrator steps per window at least
  double t_max = std::numeric_limits<double>::infinity();
};

struct StageRecord {
  int j = 1;
  double S_start = 0.0;
  double S_end = 0.0;
  double T = 0.0;
  long n = 0;
  double Delta = 0.0;
  double D_start = 0.0;  // D~_T(S_{j-1})
  double D_end = 0.0;    // D~_T(S_j)
  double D_max = 0.0;
  double C_fit = 0.0;
  double Tj_residual = 0.0;
  bool doubling_ok = true;
  bool tripling_ok = true;
  bool capped = false;  // n limited by max_windows or t_max rather than the stop rule
  // Bridging to the next stage (filled by global_schedule)
  bool has_next = false;
  bool next_T_smaller = false;  // T_{j+1} <= T_j
  double bridge_lhs = 0.0;      // D~_{T_{j+1}}(S_j)
  double bridge_rhs = 0.0;      // 3 C D~_{T_j}(S_{j-1})
  bool bridging_ok = true;
};

/// Stop index: first n with n C T^{1/2} log(1/T) > D~_T(0); nullopt when it never fires.
inline std::optional<long> stop_index(double C, double T, double D0) {
  const double unit = C * std::sqrt(T) * std::log(1.0 / T);
  if (!(unit > 0.0) || !std::isfinite(unit)) return std::nullopt;
  const double q = D0 / unit;
  if (q >= 1e15) return std::nullopt;
  return static_cast<long>(std::floor(q)) + 1;
}

struct StageResult {
  StageRecord record;
  CoupledState final_state;
  std::vector<Snapshot> rows;  // D~ columns at T_j
};

/// Fixed-T stage starting at the state's time: windows of length T until the stop rule, the
/// doubling condition, max_windows or t_max ends it.
inline StageResult first_iteration(const CoupledState& initial, double eps, const RunConfig& cfg, int j = 1) {
  const SolveTResult sT = solve_T_report(eps, state_norm_fn(initial));
  const double T = sT.T;
  if (!(T < 1.0)) throw NumericsError("first_iteration: T = 1 leaves no log(1/T) growth scale");
  StageResult out;
  StageRecord& rec = out.record;
  rec.j = j;
  rec.T = T;
  rec.S_start = initial.time();
  rec.D_start = sT.D;
  rec.D_max = sT.D;
  rec.Tj_residual = Tj_residual(eps, T, sT.D);

  IntervalOptions io;
  io.norm_T = T;
  const double h = std::min(cfg.dt, T / std::max(1, cfg.min_steps));
  const double D0 = sT.D;

  CoupledState s = initial;
  std::optional<long> n_stop;
  long n = 0;
  out.rows.push_back(snapshot_of(s, io));
  double elapsed = 0.0;
  for (;;) {
    if (n_stop && n >= *n_stop) break;
    if (n >= cfg.max_windows) {
      rec.capped = true;
      break;
    }
    // The last window is shortened to land on t_max.
    const double rem = cfg.t_max - (rec.S_start + elapsed);
    if (rem <= 1e-6 * T) {
      rec.capped = true;
      break;
    }
    const double len = std::min(T, rem);
    Trajectory tr = solve_interval(s, len, std::min(h, len), io);
    ++n;
    elapsed = len < T ? elapsed + len : n * T;
    for (std::size_t k = 1; k < tr.rows.size(); ++k) out.rows.push_back(tr.rows[k]);
    s = std::move(tr.final_state);
    s.dirac.time = rec.S_start + elapsed;
    for (const auto& r : tr.rows) rec.D_max = std::max(rec.D_max, r.tildeD_T);
    if (n == 1) {
      rec.C_fit = growth_certificate(tr, T).C_fit;
      n_stop = stop_index(rec.C_fit, T, D0);
    }
    if (rec.D_max > 2.0 * D0 * (1 + 1e-12) && D0 > 0.0) {
      rec.doubling_ok = false;
      break;
    }
  }
  rec.n = n;
  rec.Delta = elapsed;
  rec.S_end = rec.S_start + rec.Delta;
  rec.D_end = out.rows.back().tildeD_T;
  rec.tripling_ok = rec.D_end <= 3.0 * D0 * (1 + 1e-12);
  out.final_state = std::move(s);
  return out;
}

struct ScheduleOptions {
  RunConfig run;
  int max_stages = 4;
  double magic_C = 1.0;  // calibrated constant of the quasi-monotonicity of ||.||_(T)
  double trend_fraction = 0.5;
};

struct SchedulerState {
  double epsilon = 0.0;
  std::vector<StageRecord> stages;
  std::vector<double> S;  // S_0 = start, S_j after stage j
  std::vector<double> norm_history;  // D~_{T_j}(S_{j-1}) per stage
  double C_growth = 0.0;  // last C_fit
  double harmonic_min = 0.0;  // min_j Delta_j (j + 1)
  bool trend_ok = true;
  bool reached_t_max = false;
  CoupledState final_state;

  bool all_tripling_ok() const {
    for (const auto& s : stages)
      if (!s.tripling_ok) return false;
    return true;
  }
  bool all_bridging_ok() const {
    for (const auto& s : stages)
      if (!s.bridging_ok) return false;
    return true;
  }
  double max_Tj_residual() const {
    double m = 0.0;
    for (const auto& s : stages) m = std::max(m, s.Tj_residual);
    return m;
  }
};

/// Chains stages until t_max or max_stages.  Delta_j (j + 1) >= trend_fraction * 2 Delta_1 is
/// the trend check for a harmonically divergent sum of stage lengths.
inline SchedulerState global_schedule(const CoupledState& initial, double eps, const ScheduleOptions& o) {
  if (!std::isfinite(o.run.t_max)) throw UsageError("global_schedule: t_max must be finite");
  if (o.max_stages < 1) throw UsageError("global_schedule: max_stages must be >= 1");
  SchedulerState st;
  st.epsilon = eps;
  st.S.push_back(initial.time());
  CoupledState s = initial;
  for (int j = 1; j <= o.max_stages; ++j) {
    if (!st.stages.empty() && s.time() >= o.run.t_max - 1e-6 * st.stages.back().T) break;
    StageResult r = first_iteration(s, eps, o.run, j);
    if (r.record.n == 0) break;
    if (!st.stages.empty()) {
      StageRecord& prev = st.stages.back();
      prev.has_next = true;
      prev.next_T_smaller = r.record.T <= prev.T;
      prev.bridge_lhs = r.record.D_start;
      prev.bridge_rhs = 3.0 * o.magic_C * prev.D_start;
      prev.bridging_ok = prev.bridge_lhs <= prev.bridge_rhs * (1 + 1e-12);
    }
    st.S.push_back(st.S.back() + r.record.Delta);
    r.record.S_end = st.S.back();
    r.final_state.dirac.time = st.S.back();
    st.norm_history.push_back(r.record.D_start);
    st.C_growth = r.record.C_fit;
    st.stages.push_back(r.record);
    s = std::move(r.final_state);
    if (!r.record.doubling_ok) break;
  }
  st.reached_t_max = s.time() >= o.run.t_max - 1e-6 * (st.stages.empty() ? 0.0 : st.stages.back().T);
  if (!st.stages.empty()) {
    st.harmonic_min = std::numeric_limits<double>::infinity();
    for (const auto& r : st.stages) st.harmonic_min = std::min(st.harmonic_min, r.Delta * (r.j + 1));
    st.trend_ok = st.harmonic_min >= o.trend_fraction * 2.0 * st.stages.front().Delta;
  }
  st.final_state = std::move(s);
  return st;
}

}  // namespace md2d
