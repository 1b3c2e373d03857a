#include <gtest/gtest.h>

#include "md2d/evolution.hpp"
#include "test_util.hpp"

using namespace md2d;
using md2d::testing::abs_diff;
using md2d::testing::rel_diff;

namespace {

const Grid2D grid(2.0 * kPi * 8, 64);

ChargeClassData small_data(double amp = 0.1, double em = 0.0) {
  DataSpec s;
  s.psi.amplitude = amp;
  s.psi.width = 2.0;
  s.psi.momentum = {0.5, 0.25};
  s.E = FieldSpec::band(3, em, 0.2, 1.5);
  s.B = FieldSpec::band(4, em, 0.2, 1.5);
  return make_data(grid, s);
}

Spinor dealiased_random(std::uint64_t seed) {
  Spinor s = md2d::testing::random_array<2>(grid, seed);
  for (auto& c : s) c = dealias(c);
  return s;
}

}  // namespace

TEST(FreePropagate, IdentityPhaseUnitarityGroupLaw) {
  const ComplexField2D f = md2d::testing::random_field(grid, 1);
  EXPECT_LT(rel_diff(free_propagate(f, 0.0, Phase::wave_plus), f), 1e-15);
  const Vec2 xi0 = grid.xi(3, 2);
  const ComplexField2D pw = ComplexField2D::from_function(grid, [&](Vec2 x) { return std::polar(1.0, dot(xi0, x)); });
  EXPECT_LT(rel_diff(free_propagate(pw, 0.7, Phase::wave_plus), std::polar(1.0, -0.7 * norm(xi0)) * pw), 1e-12);
  for (Phase p : {Phase::wave_plus, Phase::wave_minus, Phase::kg_plus, Phase::kg_minus}) {
    const ComplexField2D a = free_propagate(f, 1.3, p);
    EXPECT_NEAR(l2_norm(a), l2_norm(f), 1e-12 * l2_norm(f));
    EXPECT_LT(rel_diff(free_propagate(a, 0.4, p), free_propagate(f, 1.7, p)), 1e-12);
    EXPECT_LT(rel_diff(free_propagate(a, -1.3, p), f), 1e-12);
  }
}

TEST(DiracRhs, ZeroPotentialZeroMass) {
  const Spinor psi = dealiased_random(2);
  const PotentialState pot = PotentialState::zero(grid);
  const DiracTendency t = dirac_rhs(psi, pot.A, 0.0);
  EXPECT_EQ(l2_norm(t.plus) + l2_norm(t.minus), 0.0);
}

TEST(DiracRhs, MassTermOnSingleMode) {
  const Vec2 xi0 = grid.xi(2, 1);
  const Mat2 P = dirac_projection_symbol(xi0, 1);
  const Spin z = P * Spin(1.0, 0.3);
  Spinor psi;
  for (int c = 0; c < 2; ++c)
    psi[c] = ComplexField2D::from_function(grid, [&](Vec2 x) { return z(c) * std::polar(1.0, dot(xi0, x)); });
  const double M = 0.8;
  const DiracTendency t = dirac_rhs(psi, PotentialState::zero(grid).A, M);
  const auto& D = DiracMatrices::standard();
  for (int sgn : {1, -1}) {
    const Spin expect = -(dirac_projection_symbol(xi0, sgn) * (M * D.beta * z));
    const Spinor& got = sgn > 0 ? t.plus : t.minus;
    const double L2 = grid.box_period() * grid.box_period();
    const int i = 2, j = 1;
    for (int c = 0; c < 2; ++c) EXPECT_LT(std::abs(got[c].at(i, j) / L2 - expect(c)), 1e-12);
  }
}

TEST(PotentialRhs, SourcesAndLowering) {
  const Spinor zero{ComplexField2D(grid, Representation::physical), ComplexField2D(grid, Representation::physical)};
  ChargeClassData d = small_data(0.0, 0.2);
  const PotentialState pot = potential_data(d);
  const FieldArray<3> free = potential_rhs(pot, zero);
  for (int mu = 0; mu < 3; ++mu) EXPECT_LT(abs_diff(free[mu], laplacian(pot.A[mu])), 1e-14);

  Spinor cst;
  for (auto& c : cst) c = ComplexField2D::from_function(grid, [](Vec2) { return cplx(0.3, 0.1); });
  const FieldArray<3> src = potential_rhs(PotentialState::zero(grid), cst);
  for (int mu = 0; mu < 3; ++mu)
    for (std::size_t k = 1; k < src[mu].size(); ++k) EXPECT_LT(std::abs(src[mu][k]), 1e-12);

  const Spinor psi = dealiased_random(3);
  const Current J = current(psi);
  const FieldArray<3> s = potential_rhs(PotentialState::zero(grid), psi);
  ComplexField2D j0 = dealias(J.J0);
  j0[0] = 0.0;
  EXPECT_LT(abs_diff(s[0], -1.0 * j0), 1e-12 * l2_norm(j0));
  EXPECT_LT(abs_diff(s[1], dealias(J.J1)), 1e-12 * l2_norm(J.J1));
  EXPECT_LT(abs_diff(s[2], dealias(J.J2)), 1e-12 * l2_norm(J.J2));
}

TEST(Step, FreePotentialIsExactWave) {
  ChargeClassData d = small_data(0.0, 0.3);
  CoupledState s = make_state(d, 1.0);
  const PotentialState p0 = s.pot;
  for (int k = 0; k < 10; ++k) s = step(s, 0.05);
  PotentialState exact = p0;
  rotate_wave(exact, 0.5);
  for (int mu = 0; mu < 3; ++mu) {
    EXPECT_LT(abs_diff(s.pot.A[mu], exact.A[mu]), 1e-10);
    EXPECT_LT(abs_diff(s.pot.At[mu], exact.At[mu]), 1e-10);
  }
}

TEST(Step, FrozenZeroPotentialGivesFreeHalfWaves) {
  CoupledState s = make_state(small_data(0.2), 0.0);
  s.evolve_potential = false;
  s.pot = PotentialState::zero(grid);
  const DiracState d0 = s.dirac;
  for (int k = 0; k < 8; ++k) s = step(s, 0.1);
  for (int c = 0; c < 2; ++c) {
    EXPECT_LT(abs_diff(s.dirac.psi_plus[c], free_propagate(d0.psi_plus[c], 0.8, Phase::wave_plus)), 1e-12);
    EXPECT_LT(abs_diff(s.dirac.psi_minus[c], free_propagate(d0.psi_minus[c], 0.8, Phase::wave_minus)), 1e-12);
  }
}

TEST(Step, ConstantScalarPotentialRotatesPhase) {
  CoupledState s = make_state(small_data(0.2), 0.0);
  s.evolve_potential = false;
  s.pot = PotentialState::zero(grid);
  const double c = 0.7;
  s.pot.A[0] = ComplexField2D::from_function(grid, [c](Vec2) { return cplx(c); });
  const double q0 = s.dirac.charge();
  const DiracState d0 = s.dirac;
  for (int k = 0; k < 5; ++k) s = step(s, 0.1);
  EXPECT_NEAR(s.dirac.charge(), q0, 1e-13 * q0);
  const cplx ph = std::polar(1.0, c * 0.5);
  for (int cc = 0; cc < 2; ++cc)
    EXPECT_LT(abs_diff(s.dirac.psi_plus[cc], ph * free_propagate(d0.psi_plus[cc], 0.5, Phase::wave_plus)), 1e-12);
}

TEST(Step, SecondOrderConvergence) {
  const CoupledState s0 = make_state(small_data(0.5, 0.2), 1.0);
  auto run = [&](double dt) {
    IntervalOptions o;
    o.norms = false;
    return solve_interval(s0, 0.5, dt, o).final_state;
  };
  const CoupledState a = run(1.0 / 16), b = run(1.0 / 32), c = run(1.0 / 64);
  auto dist = [](const CoupledState& x, const CoupledState& y) {
    double e = 0.0;
    const Spinor px = x.dirac.psi(), py = y.dirac.psi();
    for (int k = 0; k < 2; ++k) e += std::pow(abs_diff(px[k], py[k]), 2);
    for (int mu = 0; mu < 3; ++mu) e += std::pow(abs_diff(x.pot.A[mu], y.pot.A[mu]), 2);
    return std::sqrt(e);
  };
  const double order = std::log2(dist(a, b) / dist(b, c));
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(SolveInterval, ZeroData) {
  const CoupledState s0 = make_state(ChargeClassData::zero(grid), 1.0);
  const Trajectory tr = solve_interval(s0, 0.25, 1.0 / 32);
  EXPECT_EQ(tr.rows.size(), 9u);
  for (const auto& r : tr.rows) {
    EXPECT_EQ(r.diag.charge, 0.0);
    EXPECT_EQ(r.tildeD_T, 0.0);
  }
  EXPECT_THROW(solve_interval(s0, -1.0, 0.1), UsageError);
}

TEST(SolveInterval, SmallDataConservesChargeAndConstraints) {
  const CoupledState s0 = make_state(small_data(0.1, 0.05), 1.0);
  IntervalOptions o;
  o.record_every = 4;
  o.norm_T = 0.5;
  const Trajectory tr = solve_interval(s0, 0.5, 1.0 / 128, o);
  EXPECT_LE(tr.charge_drift(), 1e-6);
  EXPECT_LE(tr.max_gauss(), 1e-5);
  EXPECT_LE(tr.max_lorenz(), 1e-5);
  for (std::size_t k = 1; k < tr.rows.size(); ++k) {
    EXPECT_GT(tr.rows[k].diag.t, tr.rows[k - 1].diag.t);
    EXPECT_LE(tr.rows[k].D_T, tr.rows[k].tildeD_T * (1 + 1e-12));
    EXPECT_LT(tr.rows[k].diag.projection_drift, 1e-10);
  }
}

TEST(SolveInterval, ConstraintViolationPropagatesWithoutGrowth) {
  // Seed a Gauss-law defect through a longitudinal velocity; the defect travels as a free wave.
  CoupledState s0 = make_state(small_data(0.1), 1.0);
  const ComplexField2D chi = random_band_field(grid, 9, 0, 0.2, 1.0, true);
  s0.pot.At[1] = as_fourier(s0.pot.At[1]) + 1e-3 * partial(chi, 0);
  s0.pot.At[2] = as_fourier(s0.pot.At[2]) + 1e-3 * partial(chi, 1);
  refresh_diagnostics(s0);
  ASSERT_GT(s0.diag.gauss_residual, 1e-5);
  IntervalOptions o;
  o.norms = false;
  const Trajectory tr = solve_interval(s0, 1.0, 1.0 / 64, o);
  EXPECT_LE(tr.max_gauss(), 10.0 * s0.diag.gauss_residual);
}

TEST(Step, BlowUpCarriesLastGoodState) {
  CoupledState s = make_state(small_data(0.1), 1.0);
  s = step(s, 0.01);
  CoupledState bad = s;
  bad.dirac.psi_plus[0][3] = cplx(std::nan(""), 0.0);
  try {
    step(bad, 0.01);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    ASSERT_NE(e.last_good(), nullptr);
    EXPECT_NEAR(e.last_good()->time(), 0.01, 1e-15);
  }
}

TEST(Duhamel, ZeroSource) {
  const Grid2D g(2.0 * kPi, 16);
  const SpaceTimeField G(SpaceTimeGrid(g, 2.0 * kPi, 64));
  const DuhamelPair u = duhamel_box_inverse(G, 0.8);
  EXPECT_EQ(l2_norm(u.plus) + l2_norm(u.minus), 0.0);
}

TEST(Duhamel, SingleSpaceTimeMode) {
  const Grid2D g(2.0 * kPi, 16);
  const SpaceTimeGrid st(g, 2.0 * kPi, 64);  // tau lattice spacing 1/2
  const Vec2 xi0 = g.xi(2, 1);
  const double k = norm(xi0), w = 1.5;
  const SpaceTimeField G =
      SpaceTimeField::from_function(st, [&](double t, Vec2 x) { return std::polar(1.0, dot(xi0, x) + w * t); });
  for (double t : {0.3, 1.1, 2.5}) {
    const DuhamelPair u = duhamel_box_inverse(G, t);
    const double L2 = g.box_period() * g.box_period();
    const cplx expect = -L2 / (k * k - w * w) *
                        (std::polar(1.0, w * t) - std::cos(k * t) - cplx(0.0, w / k) * std::sin(k * t));
    const cplx got = u.plus.at(2, 1) + u.minus.at(2, 1);
    EXPECT_LT(std::abs(got - expect), 1e-10 * std::abs(expect));
  }
}

TEST(Duhamel, MatchesLeapfrogOnSmoothSource) {
  const Grid2D g(2.0 * kPi, 16);
  const SpaceTimeGrid st(g, 2.0 * kPi, 128);
  const ComplexField2D a = random_band_field(g, 3, 0, 1.0, 4.0, false);
  const ComplexField2D b = random_band_field(g, 4, 0, 1.0, 4.0, false);
  auto G_at = [&](double t) -> ComplexField2D {
    return std::polar(1.0, 1.0 * t) * as_fourier(a) + std::cos(2.5 * t) * as_fourier(b);
  };
  SpaceTimeField G(st);
  for (int l = 0; l < st.nt; ++l) G.slices[l] = as_physical(G_at(st.t(l)));
  const double t = 1.0;
  const DuhamelPair u = duhamel_box_inverse(G, t);
  const ComplexField2D zero(g, Representation::fourier);
  ComplexField2D ref = leapfrog_wave(zero, zero, G_at, t, 1e-4);
  ref[0] = 0.0;
  EXPECT_LT(rel_diff(u.plus + u.minus, ref), 1e-6);
}

TEST(Picard, ZeroDataConvergesImmediately) {
  const PicardReport r = picard_iterate(ChargeClassData::zero(grid), 1.0, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.q.front(), 0.0);
}

TEST(Picard, ContractsAndMatchesDirectSolve) {
  const ChargeClassData d = small_data(0.1, 0.05);
  const double T = 0.01;
  PicardOptions o;
  o.dt = T / 16;
  const PicardReport r = picard_iterate(d, 1.0, T, o);
  ASSERT_GE(r.q.size(), 5u);
  for (int n = 1; n <= 3; ++n) EXPECT_LE(r.q[n + 1], 0.5 * r.q[n]) << "n = " << n;
  for (double p : r.p) EXPECT_GE(p, 0.0);
  IntervalOptions io;
  io.norms = false;
  const Trajectory tr = solve_interval(make_state(d, 1.0), T, o.dt, io);
  const Spinor direct = tr.final_state.dirac.psi();
  double e = 0.0;
  for (int c = 0; c < 2; ++c) e += std::pow(abs_diff(r.final_psi[c], direct[c]), 2);
  EXPECT_LE(std::sqrt(e), 1e-5);
}
