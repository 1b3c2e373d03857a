#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include "md2d/verifier.hpp"

using namespace md2d;
using namespace md2d::verify;

namespace {

VerifierConfig small_config(long trials = 2000, std::uint64_t seed = 7) {
  VerifierConfig c;
  c.trials = trials;
  c.seed = seed;
  return c;
}

CheckSpec uniform_ratio_check(const std::string& name) {
  return {name, [](std::mt19937_64& g, std::uint64_t) { return Sample{uniform(g), 1.0}; }};
}

class ScopedEnv {
 public:
  ScopedEnv(const char* k, const char* v) : key_(k) {
    if (const char* old = std::getenv(k)) old_ = old;
    ::setenv(k, v, 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(key_, old_->c_str(), 1);
    else ::unsetenv(key_);
  }

 private:
  const char* key_;
  std::optional<std::string> old_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Harness

TEST(Harness, SafeRatio) {
  EXPECT_EQ(safe_ratio(0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(safe_ratio(1.0, 0.0)));
  EXPECT_DOUBLE_EQ(safe_ratio(3.0, 2.0), 1.5);
}

TEST(Harness, SameSeedSameEvidence) {
  const auto spec = uniform_ratio_check("det");
  std::vector<EvidenceRow> a, b;
  run_check(spec, small_config(), &a);
  run_check(spec, small_config(), &b);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lhs, b[i].lhs);
    EXPECT_EQ(a[i].phase, b[i].phase);
  }
}

TEST(Harness, SerialAndParallelAgree) {
  const auto spec = uniform_ratio_check("threads");
  std::vector<EvidenceRow> par, ser;
  run_check(spec, small_config(), &par);
  {
    ScopedEnv env("MD2D_THREADS", "1");
    ThreadLimit lim;
    run_check(spec, small_config(), &ser);
  }
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) EXPECT_EQ(par[i].lhs, ser[i].lhs);
}

TEST(Harness, CalibrationAndAssertStreamsDiffer) {
  const auto spec = uniform_ratio_check("streams");
  std::vector<EvidenceRow> rows;
  run_check(spec, small_config(100), &rows);
  ASSERT_EQ(rows.size(), 200u);
  std::set<double> cal, as;
  for (const auto& r : rows) (r.phase == verify::Phase::calibrate ? cal : as).insert(r.lhs);
  for (double v : as) EXPECT_EQ(cal.count(v), 0u);
}

TEST(Harness, DifferentSeedsDiffer) {
  const auto spec = uniform_ratio_check("seeds");
  std::vector<EvidenceRow> a, b;
  run_check(spec, small_config(10, 1), &a);
  run_check(spec, small_config(10, 2), &b);
  EXPECT_NE(a[0].lhs, b[0].lhs);
}

TEST(Harness, CalibratedModePassesAndForcedFailureFails) {
  const auto spec = uniform_ratio_check("cal");
  EXPECT_TRUE(run_check(spec, small_config(), nullptr).pass);
  auto cfg = small_config();
  cfg.constant_scale = 0.5;
  std::vector<EvidenceRow> rows;
  const auto r = run_check(spec, cfg, &rows);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.violations, 0);
  long flagged = 0;
  for (const auto& row : rows) flagged += row.violation;
  EXPECT_EQ(flagged, r.violations);
}

TEST(Harness, AbsoluteAndRangeModes) {
  CheckSpec abs{"abs", [](std::mt19937_64& g, std::uint64_t) { return Sample{uniform(g, 0.0, 2.0), 1.0}; },
                Mode::absolute};
  EXPECT_FALSE(run_check(abs, small_config(), nullptr).pass);
  CheckSpec rng{"rng", [](std::mt19937_64& g, std::uint64_t) { return Sample{uniform(g, 1.0, 2.0), 1.0}; },
                Mode::range};
  rng.lo = 1.0;
  rng.hi = 2.0;
  EXPECT_TRUE(run_check(rng, small_config(), nullptr).pass);
  rng.lo = 1.5;
  EXPECT_FALSE(run_check(rng, small_config(), nullptr).pass);
}

TEST(Harness, TwoSidedRatio) {
  CheckSpec c{"two", [](std::mt19937_64&, std::uint64_t) { return Sample{1.0, 4.0}; }, Mode::absolute, true};
  const auto r = run_check(c, small_config(10), nullptr);
  EXPECT_DOUBLE_EQ(r.max_ratio, 4.0);
  EXPECT_FALSE(r.pass);
}

TEST(Harness, AllSkippedFails) {
  CheckSpec c{"skip", [](std::mt19937_64&, std::uint64_t) { return Sample{0, 0, "", true}; }};
  EXPECT_FALSE(run_check(c, small_config(10), nullptr).pass);
}

TEST(Harness, ThreadCapParsing) {
  {
    ScopedEnv env("MD2D_THREADS", "3");
    EXPECT_EQ(thread_cap(), 3);
  }
  {
    ScopedEnv env("MD2D_THREADS", "zero");
    EXPECT_THROW(thread_cap(), ConfigError);
  }
  {
    ScopedEnv env("MD2D_THREADS", "0");
    EXPECT_THROW(thread_cap(), ConfigError);
  }
}

TEST(Harness, LogLogSlopeOfPowerLaw) {
  std::vector<double> x, y;
  for (int k = 0; k < 6; ++k) {
    x.push_back(std::ldexp(1.0, k));
    y.push_back(3.0 * std::pow(x.back(), 0.375));
  }
  EXPECT_NEAR(loglog_slope(x, y), 0.375, 1e-12);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), UsageError);
  EXPECT_THROW(loglog_slope({1.0, 0.0}, {1.0, 1.0}), NumericsError);
}

// ---------------------------------------------------------------------------
// Null-structure suite

TEST(NullSuite, AllChecksPassOnSmallRuns) {
  const auto cfg = small_config(3000);
  for (auto f : {null_lemma1_checks, null_lemma2_checks, angles_lemma_checks, f_lemma_checks, sigma_trilinear_checks,
                 n_lemma_checks})
    for (const auto& c : f()) {
      const auto r = run_check(c, cfg, nullptr);
      EXPECT_TRUE(std::isfinite(r.calibration_max)) << c.name;
      EXPECT_LT(r.skipped, r.trials) << c.name;
    }
}

// ---------------------------------------------------------------------------
// Combinatorial lemmas

TEST(HyperLemma, WideStripCountsEverySector) {
  const double gamma = 0.3, N = 4.0;
  const Vec2 xi{N, 0.0};
  const int K = static_cast<int>(omega_family(gamma).size());
  EXPECT_EQ(hyperplane_count(0.1, xi, 2.0 * N + 1.0, gamma), K);
  EXPECT_LE(K, kHyperConstant * hyperplane_bound(N, 2.0 * N + 1.0, gamma));
}

TEST(HyperLemma, WideSectorsAreFew) {
  std::mt19937_64 g(3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 xi = unit_vector(uniform(g, -kPi, kPi)) * uniform(g, 1.0, 2.0);
    EXPECT_LE(hyperplane_count(uniform(g, -3.0, 3.0), xi, 0.5, 0.99 * kPi), 3);
  }
}

TEST(Whitney1, ThirdOfPiHasActiveTerm) {
  const int s = whitney1_sum(unit_vector(0.2), unit_vector(0.2 + kPi / 3.0));
  EXPECT_GE(s, 1);
  EXPECT_LE(s, kWhitneyUpper);
}

TEST(Whitney1, CollinearPairRejected) { EXPECT_THROW(whitney1_sum({1.0, 0.0}, {2.0, 0.0}), ConstraintViolation); }

TEST(Whitney2, DominationForKEqualsTwo) {
  std::mt19937_64 g(5);
  for (int i = 0; i < 2000; ++i) {
    const double gamma = log_uniform(g, 0.01, 1.0), phi = uniform(g, -kPi, kPi);
    const double theta = uniform(g, 0.0, 2.0 * gamma);
    EXPECT_GE(whitney2_sum(unit_vector(phi), unit_vector(phi + theta), gamma, 2), 1);
  }
}

TEST(OmegaIndex, MembersMatchBruteForce) {
  std::mt19937_64 g(11);
  for (double gamma : {0.05, 0.4, 1.3, kPi}) {
    const OmegaIndex om(gamma);
    const auto fam = omega_family(gamma);
    for (int i = 0; i < 50; ++i) {
      const Vec2 xi = unit_vector(uniform(g, -kPi, kPi));
      std::set<int> brute;
      for (int k = 0; k < static_cast<int>(fam.size()); ++k)
        if (angle(xi, fam[k]) <= gamma) brute.insert(k);
      const auto m = om.members(xi);
      EXPECT_EQ(std::set<int>(m.begin(), m.end()), brute);
    }
  }
}

TEST(SetInclusion, GammaPiAndOnRay) {
  std::mt19937_64 g(9);
  const Vec2 om{0.6, 0.8};
  for (int i = 0; i < 500; ++i) {
    double tau;
    Vec2 xi;
    sample_k_point(g, 4.0, 8.0, kPi, om, 1, false, tau, xi);
    EXPECT_LE(std::abs(tau + dot(xi, om)), kInclusionConstant * std::max(8.0, 4.0 * kPi * kPi));
  }
  const Vec2 xi = om * 5.0;
  EXPECT_NEAR(-norm(xi) + dot(xi, om), 0.0, 1e-12);
  EXPECT_NEAR(norm(xi) + dot(-1.0 * xi, om), 0.0, 1e-12);
}

TEST(OmegaSum, SectorOverlapAndCardinality) {
  std::mt19937_64 g(13);
  for (int i = 0; i < 100; ++i) {
    const auto u = random_sparse_field(g, 16);
    const double gamma = log_uniform(g, 0.05, kPi);
    double s = 0.0;
    for (double e : sector_energies(u, OmegaIndex(gamma))) s += e;
    EXPECT_GE(s, u.norm2() * (1 - 1e-12));
    EXPECT_LE(s, 3.0 * u.norm2() * (1 + 1e-12));
    for (int k : {1, 2}) {
      const auto t = omega_sum_terms(u, u, gamma, k);
      EXPECT_LE(t.max_cardinality, 2 * k + 1);
      EXPECT_LE(t.pair_sum, kOmegaSumConstant * std::sqrt(t.sector1 * t.sector2) * (1 + 1e-12));
    }
  }
}

TEST(Combinatorial, ZeroViolationsOnSmallRuns) {
  for (const auto& c : combinatorial_checks()) {
    const auto r = run_check(c, small_config(1000), nullptr);
    EXPECT_TRUE(r.pass) << c.name << " max " << r.max_ratio;
    EXPECT_EQ(r.violations, 0) << c.name;
  }
}

// ---------------------------------------------------------------------------
// Energy lemma

TEST(EnergyLemma, FreeModeMatchesClosedForm) {
  EnergyTrial t;
  t.family = SourceFamily::free;
  t.modes.push_back({{3.0, 0.0}, cplx(0.0), cplx(1.2, 0.0), cplx(0.0), 0.0});
  // u = g sin(3t) / 3 peaks at t = pi / 6 inside [-1, 1].
  EXPECT_NEAR(energy_sup_norms(t, {0.0})[0], 0.4, 1e-5);
  t.modes[0].f = 1.0;
  t.modes[0].g = 0.0;
  EXPECT_NEAR(energy_sup_norms(t, {-1.0})[0], 1.0 / std::sqrt(10.0), 1e-9);
}

TEST(EnergyLemma, ModulationIntegralConverged) {
  const EnergyMode m{{2.0, 1.0}, 0.0, 0.0, cplx(0.5, 0.5), 2.3};
  const double a = modulation_integral(m, 0.7), b = modulation_integral(m, 0.7, 8000);
  EXPECT_NEAR(a, b, 1e-6 * b);  // kink of <|tau| - |xi|> limits Simpson order
  EXPECT_EQ(modulation_integral({{1.0, 0.0}, 0.0, 0.0, cplx(0.0), 1.0}, 1.0), 0.0);
}

TEST(EnergyLemma, RatioBoundedOnSmallRun) {
  for (const auto& c : energy_lemma_checks()) {
    const auto r = run_check(c, small_config(200), nullptr);
    EXPECT_TRUE(std::isfinite(r.max_ratio)) << c.name;
    EXPECT_LT(r.max_ratio, 10.0) << c.name;
  }
}

// ---------------------------------------------------------------------------
// Bilinear sweeps

TEST(PacketSupport, SamplesLieInside) {
  std::mt19937_64 g(21);
  PacketSupport tube{16.0, 4.0, -1};
  tube.tube = 3.0;
  PacketSupport sector{8.0, 2.0, 1, 0.4, unit_vector(1.0)};
  for (const auto& s : {PacketSupport{4.0, 1.0, 1}, tube, sector})
    for (int i = 0; i < 1000; ++i) {
      double tau;
      Vec2 xi;
      s.sample(g, tau, xi);
      EXPECT_TRUE(s.contains(tau, xi));
    }
}

TEST(PacketSupport, TubeAreaMatchesMonteCarlo) {
  PacketSupport s{8.0, 1.0, 1};
  s.tube = 2.5;
  std::mt19937_64 g(4);
  const double R = s.rho_hi();
  long hit = 0;
  const long M = 400000;
  for (long i = 0; i < M; ++i) {
    const Vec2 x{uniform(g, -R, R), uniform(g, -R, R)};
    const double r = norm(x);
    if (r >= s.rho_lo() && r < R && std::abs(x.y) <= s.tube) ++hit;
  }
  EXPECT_NEAR(s.spatial_area(), 4.0 * R * R * hit / M, 0.02 * s.spatial_area());
  s.tube = 1e6;
  EXPECT_NEAR(s.spatial_area(), kPi * (R * R - s.rho_lo() * s.rho_lo()), 1e-9);
}

TEST(BilinearBounds, UnitShellsAgree) {
  const ShellTriple t{1, 1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(bilinear1_bound(t), 1.0);
  EXPECT_DOUBLE_EQ(bilinear2_bound(t, 2), 1.0);
  EXPECT_DOUBLE_EQ(bilinear3_bound(t), 1.0);
  EXPECT_DOUBLE_EQ(sobolev_type_bound(t), 1.0);
  // Quadrupling L_min doubles Bilinear1 when it stays the minimum.
  EXPECT_NEAR(bilinear1_bound({8, 8, 8, 1, 4, 64}) / bilinear1_bound({8, 8, 8, 1, 1, 64}), 2.0, 1e-12);
}

TEST(BilinearProduct, NormDoesNotExceedSobolevScale) {
  // ||u1 u2|| <= |S2|^{1/2} ||u1|| ||u2|| for flat packets.
  std::mt19937_64 g(8);
  const PacketSupport a{4.0, 2.0, 1}, b{4.0, 1.0, -1};
  const double n = bilinear_product_norm(a, b, nullptr, ProductWeight::none, 100000, g);
  EXPECT_GT(n, 0.0);
  EXPECT_LE(n, std::sqrt(b.volume()));
}

TEST(BilinearProduct, NullWeightSuppresses) {
  std::mt19937_64 g1(2), g2(2);
  const PacketSupport a{16.0, 1.0, 1}, b{16.0, 1.0, -1};
  const double plain = bilinear_product_norm(a, b, nullptr, ProductWeight::none, 100000, g1);
  const double weighted = bilinear_product_norm(a, b, nullptr, ProductWeight::theta12, 100000, g2);
  EXPECT_LT(weighted, kPi * plain);
}

TEST(BilinearScaling, SweepsRecoverExponentsAtReducedSampling) {
  BilinearConfig bc;
  bc.samples = 100000;
  const auto cfg = small_config();
  const auto lmin = sweep_l_min(cfg, bc);
  EXPECT_NEAR(lmin.slope(), 0.5, kSlopeTolerance);
  const auto r = sweep_null_ray(cfg, bc);
  EXPECT_NEAR(r.slope(), 0.5, kSlopeTolerance);
  EXPECT_LE(r.spread(), kSpreadLimit);
}

// ---------------------------------------------------------------------------
// Magic norm monotonicity

TEST(MagicMonotone, EqualTimesGiveRatioOne) {
  const Grid2D g(2.0 * kPi * 4.0, 64);
  std::mt19937_64 r(3);
  const auto f = random_shell_profile(g, r, 8);
  const double a = magic_parts(f, g.box_period(), 0.3).total();
  EXPECT_DOUBLE_EQ(a, magic_parts(f, g.box_period(), 0.3).total());
}

TEST(MagicMonotone, RestrictToBandKeepsOnlyCoarseModes) {
  const Grid2D fine(2.0 * kPi * 4.0, 128), coarse(2.0 * kPi * 4.0, 64);
  std::mt19937_64 r(5);
  const auto f = random_shell_profile(fine, r, 16);
  const auto c = restrict_to_band(f, coarse);
  const double kmax = coarse.dk() * coarse.dealias_cutoff();
  std::size_t inside = 0;
  for (const auto& m : f) inside += norm(m.xi) <= kmax ? 1 : 0;
  EXPECT_LT(c.size(), f.size());
  EXPECT_LE(c.size(), inside);
  for (const auto& m : c) EXPECT_LE(norm(m.xi), kmax);
  EXPECT_EQ(restrict_to_band(c, coarse).size(), c.size());
}

TEST(MagicMonotone, SmallRunStable) {
  MagicSweep sw;
  sw.n = 64;
  const auto rep = verify_magic_monotone(small_config(500), {}, sw, 128);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_TRUE(std::isfinite(rep.checks[0].max_ratio));
  EXPECT_GT(rep.checks[0].max_ratio, 0.0);
}

// ---------------------------------------------------------------------------
// Registry and report

TEST(Registry, NamesUniqueAndLookup) {
  std::set<std::string> names;
  for (const auto& e : lemma_registry()) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  EXPECT_EQ(find_lemma("WhitneyLemma2").name, "WhitneyLemma2");
  EXPECT_THROW(find_lemma("NoSuchLemma"), ConfigError);
}

TEST(Registry, RunLemmaStreamsRowsAndReports) {
  std::size_t n = 0;
  const auto rep = run_lemma(find_lemma("WhitneyLemma2"), small_config(), [&](const auto& rows) { n += rows.size(); },
                             1000);
  EXPECT_EQ(n, 2000u);
  EXPECT_TRUE(rep.pass);
  const auto j = to_json(rep);
  EXPECT_EQ(j["lemma"], "WhitneyLemma2");
  EXPECT_EQ(j["trials"], 1000);
  EXPECT_TRUE(j.contains("slope_estimates"));
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Registry, ForcedFailureKeepsFailingRows) {
  auto cfg = small_config();
  cfg.constant_scale = 0.5;
  const auto rep = run_lemma(find_lemma("ShellInclusion"), cfg, {}, 1000);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.failures.empty());
  for (const auto& r : rep.failures) EXPECT_TRUE(r.violation);
}

TEST(Report, CsvRowFormat) {
  std::ostringstream os;
  write_evidence_row(os, {"c", verify::Phase::calibrate, 3, 1.0, 2.0, 0.5, "t", false});
  EXPECT_EQ(os.str(), "c,calibrate,3,1,2,0.5,t,0\n");
  EXPECT_TRUE(std::string(kEvidenceHeader).starts_with("check,phase,sample_id,lhs,rhs,ratio,tag"));
}

TEST(Report, NonFiniteBecomesNull) {
  CheckResult c;
  c.name = "x";
  c.max_ratio = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(to_json(c)["max_ratio"].is_null());
}
