// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "md2d/app.hpp"

using namespace md2d;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

AppConfig reference_config() { return AppConfig{}; }

CoupledState reference_state(double amp = 0.1) {
  AppConfig c = reference_config();
  c.data.psi.amplitude = amp;
  return app::initial_state(c);
}

Vec2 random_xi(std::mt19937_64& r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mag = std::pow(2.0, -6.0 + 12.0 * u(r)), phi = 2.0 * kPi * u(r);
  return {mag * std::cos(phi), mag * std::sin(phi)};
}

Outcome algebra() {
  std::mt19937_64 r(11);
  const Mat2 I = Mat2::Identity();
  double worst_proj = 0.0, worst_prop = 0.0;
  std::uniform_real_distribution<double> ut(-4.0, 4.0);
  const Phase phases[] = {Phase::wave_plus, Phase::wave_minus, Phase::kg_plus, Phase::kg_minus};
  for (int t = 0; t < 100000; ++t) {
    const Vec2 xi = random_xi(r);
    const Mat2 p = dirac_projection_symbol(xi, 1), m = dirac_projection_symbol(xi, -1);
    worst_proj = std::max({worst_proj, (p * p - p).norm(), (m * m - m).norm(), (p - p.adjoint()).norm(),
                           (m - m.adjoint()).norm(), (p * m).norm(), (m * p).norm(), (p + m - I).norm()});
    const Phase ph = phases[t % 4];
    const double a = ut(r), b = ut(r), w = phase_symbol(ph, xi);
    const cplx ea = std::polar(1.0, -a * w), eb = std::polar(1.0, -b * w), eab = std::polar(1.0, -(a + b) * w);
    worst_prop = std::max({worst_prop, std::abs(std::abs(ea) - 1.0), std::abs(ea * eb - eab)});
  }
  // Field-level propagator on a lattice.
  const Grid2D g(2.0 * kPi * 8, 64);
  std::mt19937_64 rf(12);
  std::normal_distribution<double> nd;
  ComplexField2D f(g, Representation::physical);
  for (auto& v : f.data()) v = cplx(nd(rf), nd(rf));
  f = as_fourier(f);
  for (Phase ph : phases) {
    const ComplexField2D a = free_propagate(f, 1.3, ph);
    const ComplexField2D ab = free_propagate(a, 0.4, ph), direct = free_propagate(f, 1.7, ph);
    worst_prop = std::max({worst_prop, std::abs(l2_norm(a) - l2_norm(f)) / l2_norm(f),
                           l2_norm(ab - direct) / l2_norm(f)});
  }
  const double worst = std::max(worst_proj, worst_prop);
  return {worst <= 1e-12, fmt::format("projection err {:.2e}, propagator err {:.2e} (tol 1e-12, 1e5 samples)",
                                      worst_proj, worst_prop)};
}

Outcome charge() {
  IntervalOptions o;
  o.norms = false;
  const CoupledState s = reference_state();
  const double d1 = solve_interval(s, 0.5, 1.0 / 256, o).charge_drift();
  const double d2 = solve_interval(s, 0.5, 1.0 / 512, o).charge_drift();
  const double shrink = d2 > 0.0 ? d1 / d2 : std::numeric_limits<double>::infinity();
  return {d1 <= 1e-6 && shrink >= 3.5,
          fmt::format("drift {:.3e} (tol 1e-6), dt-halving shrink {:.2f} (need >= 3.5), drift at dt/2 {:.3e}", d1,
                      shrink, d2)};
}

Outcome constraints() {
  IntervalOptions o;
  o.norms = false;
  const Trajectory tr = solve_interval(reference_state(), 0.5, 1.0 / 256, o);
  return {tr.max_gauss() <= 1e-5 && tr.max_lorenz() <= 1e-5,
          fmt::format("max gauss {:.3e}, max lorenz {:.3e} (tol 1e-5)", tr.max_gauss(), tr.max_lorenz())};
}

Outcome duhamel() {
  const Grid2D g(2.0 * kPi, 16);
  const SpaceTimeGrid st(g, 2.0 * kPi, 128);
  std::mt19937_64 r(4);
  // Temporal frequencies on the half-integer lattice of the 4 pi window.
  std::uniform_int_distribution<int> uw(0, 6);
  std::uniform_real_distribution<double> ut(0.3, 1.5);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ComplexField2D a = as_fourier(random_band_field(g, 100 + 2 * k, 0, 1.0, 4.0, false));
    const ComplexField2D b = as_fourier(random_band_field(g, 101 + 2 * k, 0, 1.0, 4.0, false));
    const double w1 = 0.5 * uw(r), w2 = 0.5 * uw(r), t = ut(r);
    auto G_at = [&](double s) -> ComplexField2D { return std::polar(1.0, w1 * s) * a + std::cos(w2 * s) * b; };
    SpaceTimeField G(st);
    for (int l = 0; l < st.nt; ++l) G.slices[l] = as_physical(G_at(st.t(l)));
    const DuhamelPair u = duhamel_box_inverse(G, t);
    const ComplexField2D zero(g, Representation::fourier);
    ComplexField2D ref = leapfrog_wave(zero, zero, G_at, t, 1e-4);
    ref[0] = 0.0;
    const ComplexField2D got = as_fourier(u.plus + u.minus);
    worst = std::max(worst, l2_norm(got - ref) / l2_norm(ref));
  }
  return {worst <= 1e-6, fmt::format("worst relative l2 error {:.3e} over 20 sources (tol 1e-6)", worst)};
}

Outcome lemma_group(const std::vector<std::string>& names, bool zero_violations) {
  verify::VerifierConfig cfg;
  const verify::ThreadLimit limit;
  bool pass = true;
  std::string detail;
  for (const auto& n : names) {
    const verify::LemmaReport rep = verify::run_lemma(verify::find_lemma(n), cfg);
    bool ok = rep.pass;
    if (zero_violations) ok = ok && rep.failures.empty();
    pass = pass && ok;
    detail += fmt::format("{}{} {} (max ratio {:.3g})", detail.empty() ? "" : "; ", n, ok ? "ok" : "FAILED",
                          rep.max_ratio());
    for (const auto& c : rep.checks)
      if (!c.pass) detail += fmt::format(" [{} failed: max {:.3g}, {} violations]", c.name, c.max_ratio, c.violations);
  }
  return {pass, detail};
}

Outcome picard() {
  const CoupledState s = reference_state();
  AppConfig c = reference_config();
  const double T = solve_T(0.1, state_norm_fn(s));
  PicardOptions o;
  o.dt = std::min(c.integrator.dt, T / 16);
  const PicardReport r = picard_iterate(make_data(c.make_grid(), c.data), c.physics.M, T, o);
  double worst_q = 0.0;
  for (int n = 1; n <= 3; ++n)
    worst_q = std::max(worst_q, r.q.size() > static_cast<std::size_t>(n + 1) && r.q[n] > 0.0 ? r.q[n + 1] / r.q[n]
                                                                                              : 0.0);
  const bool enough = r.q.size() >= 5;
  IntervalOptions io;
  io.norms = false;
  const Spinor direct = solve_interval(s, T, r.dt, io).final_state.dirac.psi();
  double e = 0.0;
  for (int k = 0; k < 2; ++k) e += std::pow(l2_norm(as_physical(r.final_psi[k]) - as_physical(direct[k])), 2);
  e = std::sqrt(e);
  return {enough && worst_q <= 0.5 && e <= 1e-5,
          fmt::format("T {:.4g}, max q_(n+1)/q_n {:.3g} for n=1..3 (tol 0.5), iterate vs direct {:.3e} (tol 1e-5)", T,
                      worst_q, e)};
}

Outcome growth() {
  const std::vector<double> Ts{0.125, 0.0625, 0.03125, 0.015625};
  const double dt = reference_config().integrator.dt;
  const GrowthSweep a = growth_sweep(reference_state(0.1), Ts, dt);
  const GrowthSweep b = growth_sweep(reference_state(0.2), Ts, dt);
  bool mono = true;
  std::string cs;
  for (std::size_t k = 0; k < Ts.size(); ++k) {
    mono = mono && a.rows[k].finite && b.rows[k].C_fit >= a.rows[k].C_fit;
    cs += fmt::format("{}{:.3g}", k ? "," : "", a.rows[k].C_fit);
  }
  return {a.spread <= 2.0 && mono,
          fmt::format("C_fit [{}] spread {:.2f} (tol 2), amplitude doubling nondecreasing: {}", cs, a.spread,
                      mono ? "yes" : "no")};
}

Outcome scheduler() {
  AppConfig c = reference_config();
  const double eps = c.physics.epsilon;
  ScheduleOptions o = app::schedule_options(c);
  o.run.t_max = 1e6;
  o.run.max_windows = 1024;
  o.max_stages = 4;
  const SchedulerState st = global_schedule(app::initial_state(c), eps, o);
  const bool four = st.stages.size() == 4;
  const double res = st.max_Tj_residual();
  return {four && res <= 1e-6 * eps && st.all_tripling_ok() && st.harmonic_min > 0.0,
          fmt::format("{} stages, max Tj residual {:.3e} (tol {:.1e}), tripling {}, min Delta_j (j+1) {:.4g}",
                      st.stages.size(), res, 1e-6 * eps, st.all_tripling_ok() ? "ok" : "FAILED", st.harmonic_min)};
}

}  // namespace

int main() {
  const std::vector<Criterion> crit{
      {1, "algebraic exactness", 10, algebra},
      {2, "charge conservation", 300, charge},
      {3, "constraint propagation", 0, constraints},
      {4, "Duhamel oracle equivalence", 0, duhamel},
      {5, "MagicLemma monotonicity", 0, [] { return lemma_group({"MagicMonotone"}, false); }},
      {6, "null-structure suite", 120,
       [] { return lemma_group({"NullLemma1", "NullLemma2", "AnglesLemma", "FLemma", "SigmaTrilinear", "NLemma"}, false); }},
      {7, "combinatorial suite", 0,
       [] {
         return lemma_group({"HyperLemma", "WhitneyLemma1", "WhitneyLemma2", "ShellInclusion", "OmegaSum"}, true);
       }},
      {8, "bilinear-estimate scaling", 0, [] { return lemma_group({"BilinearScaling", "Cutoff2"}, false); }},
      {9, "Picard contraction", 0, picard},
      {10, "growth estimate", 0, growth},
      {11, "scheduler", 0, scheduler},
      {12, "energy lemma", 0, [] { return lemma_group({"EnergyLemma"}, false); }},
  };
  int failed = 0;
  for (const auto& c : crit) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt::format("{:.1f}s", secs);
    if (c.budget_s > 0.0) {
      timing += fmt::format(" (budget {:.0f}s)", c.budget_s);
      if (secs > c.budget_s) {
        o.pass = false;
        timing += " OVER BUDGET";
      }
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %2d %s: %s; %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(crit.size()) - failed, crit.size());
  return failed == 0 ? 0 : 1;
}
