#include <gtest/gtest.h>

#include <random>

#include "md2d/dirac_fields.hpp"
#include "test_util.hpp"

using namespace md2d;
using md2d::testing::rel_diff;

namespace {

Vec2 random_xi(std::mt19937_64& rng) {
  return {md2d::gaussian(rng) * 3.0, md2d::gaussian(rng) * 3.0};
}

Spin random_unit_spin(std::mt19937_64& rng) {
  Spin z(cplx(gaussian(rng), gaussian(rng)), cplx(gaussian(rng), gaussian(rng)));
  return z / z.norm();
}

// Pauli matrices written out independently of DiracMatrices.
Mat2 pauli(int k) {
  Mat2 m;
  if (k == 0) m << 1, 0, 0, 1;
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, cplx(0, -1), cplx(0, 1), 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

Mat2 projection_by_hand(Vec2 xi, int sign) {
  const double r = norm(xi);
  return 0.5 * (pauli(0) + sign * (xi.x / r * pauli(1) + xi.y / r * pauli(2)));
}

}  // namespace

TEST(DiracMatrices, Representation) {
  const auto& D = DiracMatrices::standard();
  const Mat2 I = Mat2::Identity();
  for (int mu = 0; mu < 3; ++mu) {
    EXPECT_LT((D.alpha(mu) - pauli(mu)).norm(), 1e-15);
    EXPECT_LT((D.alpha(mu) - D.alpha(mu).adjoint()).norm(), 1e-15);
    EXPECT_LT((D.alpha(mu) * D.alpha(mu) - I).norm(), 1e-15);
  }
  EXPECT_LT((D.beta - pauli(3)).norm(), 1e-15);
  EXPECT_LT((D.alpha1 * D.alpha2 + D.alpha2 * D.alpha1).norm(), 1e-15);
  EXPECT_EQ(metric(0), -1.0);
  EXPECT_EQ(metric(2), 1.0);
}

TEST(Projection, Examples) {
  Mat2 a;
  a << 0.5, 0.5, 0.5, 0.5;
  EXPECT_LT((dirac_projection_symbol({1.0, 0.0}, 1) - a).norm(), 1e-15);
  Mat2 b;
  b << 0.5, cplx(0, -0.5), cplx(0, 0.5), 0.5;
  EXPECT_LT((dirac_projection_symbol({0.0, 1.0}, 1) - b).norm(), 1e-15);
  EXPECT_THROW(dirac_projection_symbol({0.0, 0.0}, 1), ConstraintViolation);
  EXPECT_LT((projection_or_half({0.0, 0.0}, -1) - 0.5 * Mat2::Identity()).norm(), 1e-15);
}

TEST(Projection, AlgebraOnRandomFrequencies) {
  std::mt19937_64 rng(1);
  const Mat2 I = Mat2::Identity();
  for (int t = 0; t < 2000; ++t) {
    const Vec2 xi = random_xi(rng);
    const Mat2 p = dirac_projection_symbol(xi, 1), m = dirac_projection_symbol(xi, -1);
    EXPECT_LT((p * p - p).norm(), 1e-14);
    EXPECT_LT((p - p.adjoint()).norm(), 1e-14);
    EXPECT_LT((p * m).norm(), 1e-14);
    EXPECT_LT((p + m - I).norm(), 1e-14);
    EXPECT_LT((p - projection_by_hand(xi, 1)).norm(), 1e-14);
    EXPECT_LT((dirac_projection_symbol(-1.0 * xi, 1) - m).norm(), 1e-14);
  }
}

TEST(Projection, FieldSplitting) {
  const Grid2D g(2.0 * kPi * 2, 32);
  Spinor psi = as_fourier(md2d::testing::random_array<2>(g, 3));
  const cplx z0 = psi[0][0];
  const Spinor half = apply_projection(psi, 1);
  EXPECT_LT(std::abs(half[0][0] - 0.5 * z0), 1e-15 * std::abs(z0));
  // I/2 at the zero mode is not idempotent, so check the projection laws on mean-free data.
  psi[0][0] = psi[1][0] = 0.0;
  const Spinor p = apply_projection(psi, 1), m = apply_projection(psi, -1);
  for (int c = 0; c < 2; ++c) EXPECT_LT(rel_diff(p[c] + m[c], psi[c]), 1e-12);
  const double total = norm_squared(psi);
  EXPECT_NEAR(norm_squared(p) + norm_squared(m), total, 1e-12 * total);
  const Spinor pp = apply_projection(p, 1);
  for (int c = 0; c < 2; ++c) EXPECT_LT(rel_diff(pp[c], p[c]), 1e-12);
  EXPECT_LT(l2_norm(apply_projection(p, -1)), 1e-12 * l2_norm(p));
}

TEST(Angle, Examples) {
  EXPECT_NEAR(angle({1, 0}, {1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(angle({1, 0}, {0, 1}), kPi / 2, 1e-15);
  EXPECT_NEAR(angle({1, 0}, {-1, 0}), kPi, 1e-15);
  EXPECT_NEAR(angle({2, 1}, {-1, 3}), angle({-1, 3}, {2, 1}), 1e-15);
  EXPECT_THROW(angle({0, 0}, {1, 0}), ConstraintViolation);
}

TEST(SignTable, Rows) {
  auto mk = [](double r1, double r2, int s1, int s2) {
    return BilinearInteraction::make({0.0, {r1, 0.0}}, {0.0, {0.0, r2}}, 1, s1, s2);
  };
  EXPECT_EQ(classify_sign_pm12(mk(2, 1, 1, 1)), 1);
  EXPECT_EQ(classify_sign_pm12(mk(1, 2, 1, 1)), -1);
  EXPECT_EQ(classify_sign_pm12(mk(1, 1, 1, 1)), -1);  // tie
  EXPECT_EQ(classify_sign_pm12(mk(1, 2, 1, -1)), 1);
  EXPECT_EQ(classify_sign_pm12(mk(2, 1, -1, -1)), -1);
  EXPECT_EQ(classify_sign_pm12(mk(1, 2, -1, -1)), 1);
  EXPECT_EQ(classify_sign_pm12(mk(1, 1, -1, -1)), 1);
  EXPECT_EQ(classify_sign_pm12(mk(2, 1, -1, 1)), -1);
  EXPECT_THROW(classify_sign_pm12(mk(0, 1, 1, 1)), ConstraintViolation);
}

TEST(Q1234, VanishesWhenAllAnglesVanish) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const Vec2 e = unit_vector(uniform(rng, 0, 2 * kPi));
    QuadInteraction q;
    for (int j = 0; j < 4; ++j) {
      q.e[j] = e;
      q.z[j] = random_unit_spin(rng);
    }
    Spin z2 = dirac_projection_symbol(e, 1) * q.z[0];
    if (z2.norm() > 1e-8) q.z[1] = z2 / z2.norm();
    Spin z4 = dirac_projection_symbol(e, 1) * q.z[2];
    if (z4.norm() > 1e-8) q.z[3] = z4 / z4.norm();
    EXPECT_EQ(null_bound_q1234(q), 0.0);
    EXPECT_LT(std::abs(q1234_symbol(q)), 1e-14);
  }
}

TEST(Q1234, ExplicitExpansionAgrees) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    QuadInteraction q;
    for (int j = 0; j < 4; ++j) {
      q.e[j] = unit_vector(uniform(rng, 0, 2 * kPi));
      q.z[j] = random_unit_spin(rng);
    }
    Spin p[4];
    for (int j = 0; j < 4; ++j) p[j] = projection_by_hand(q.e[j], 1) * q.z[j];
    auto ip = [](const Spin& a, const Spin& b) { return std::conj(b(0)) * a(0) + std::conj(b(1)) * a(1); };
    const cplx expect = -ip(pauli(0) * p[0], p[1]) * ip(pauli(0) * p[2], p[3]) +
                        ip(pauli(1) * p[0], p[1]) * ip(pauli(1) * p[2], p[3]) +
                        ip(pauli(2) * p[0], p[1]) * ip(pauli(2) * p[2], p[3]);
    EXPECT_LT(std::abs(q1234_symbol(q) - expect), 1e-14);
  }
}

TEST(Q1234, ZeroTimeComponentLeavesSpatialTerms) {
  // z2 orthogonal to Pi(e1) z1 inside the same range: the alpha^0 factor vanishes.
  QuadInteraction q;
  q.e = {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, 1}};
  q.z = {Spin(1, 0), Spin(1, 0), Spin(1, 0), Spin(1, 0)};
  // Pi((1,0)) (1,0) = (1/2,1/2); Pi((-1,0)) (1,0) = (1/2,-1/2): orthogonal.
  // Pi((0,1)) (1,0) = (1/2, i/2) for both 3 and 4.
  // <sigma^1 p1, p2> = <(1/2,1/2),(1/2,-1/2)> = 0, <sigma^2 p1, p2> = <(-i/2, i/2),(1/2,-1/2)> = -i/2
  // <sigma^2 p3, p4> = <(1/2, i/2),(1/2, i/2)> with sigma^2 p3 = (1/2, i/2) -> 1/2
  const cplx expect = cplx(0, -0.5) * 0.5;
  EXPECT_LT(std::abs(q1234_symbol(q) - expect), 1e-15);
}

TEST(Q1234, BoundArithmetic) {
  QuadInteraction q;
  q.e = {Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 0}, Vec2{0, 1}};
  for (auto& z : q.z) z = Spin(1, 0);
  // theta12 = theta34 = pi/2, phi = min(theta13, theta14, theta23, theta24) = 0
  EXPECT_NEAR(null_bound_q1234(q), kPi * kPi / 4, 1e-14);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    for (auto& e : q.e) e = unit_vector(uniform(rng, 0, 2 * kPi));
    const double t12 = angle(q.e[0], q.e[1]), t34 = angle(q.e[2], q.e[3]);
    const double phi = std::min({angle(q.e[0], q.e[2]), angle(q.e[0], q.e[3]), angle(q.e[1], q.e[2]),
                                 angle(q.e[1], q.e[3])});
    EXPECT_NEAR(null_bound_q1234(q), t12 * t34 + phi * std::max(t12, t34) + phi * phi, 1e-13);
    EXPECT_NEAR(null_bound_q1234_regime(q), angle(q.e[0], q.e[2]) * angle(q.e[1], q.e[3]), 1e-13);
  }
}

TEST(SigmaTrilinear, ZeroAndBruteForce) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    const Vec2 x1 = random_xi(rng), x2 = random_xi(rng);
    const int s1 = uniform(rng) < 0.5 ? 1 : -1, s2 = uniform(rng) < 0.5 ? 1 : -1;
    const Spin z1 = random_unit_spin(rng), z2 = random_unit_spin(rng);
    EXPECT_EQ(sigma_trilinear_symbol(x1, x2, s1, s2, z1, z2, {0.0, 0.0, 0.0}), cplx(0.0));
    const std::array<cplx, 3> gv{cplx(gaussian(rng), 0), cplx(gaussian(rng), gaussian(rng)),
                                 cplx(gaussian(rng), gaussian(rng))};
    const Spin p1 = projection_by_hand(s1 * x1, 1) * z1, p2 = projection_by_hand(s2 * x2, 1) * z2;
    const cplx expect = (p2.adjoint() * pauli(1) * p1)(0, 0) * gv[1] + (p2.adjoint() * pauli(2) * p1)(0, 0) * gv[2];
    EXPECT_LT(std::abs(sigma_trilinear_symbol(x1, x2, s1, s2, z1, z2, gv) - expect), 1e-13);
  }
}

TEST(SigmaKL, AntisymmetryAndDirectEvaluation) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 500; ++t) {
    const SpaceTimePoint X1{gaussian(rng), random_xi(rng)}, X2{gaussian(rng), random_xi(rng)};
    const Spin z1 = random_unit_spin(rng), z2 = random_unit_spin(rng);
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(sigma_kl_symbol(X1, X2, 1, -1, z1, z2, k, k), cplx(0.0));
      EXPECT_LT(std::abs(sigma_kl_symbol(X1, X1, 1, 1, z1, z2, k, (k + 1) % 3)), 1e-15);
    }
    const Spin p1 = projection_by_hand(X1.xi, 1) * z1, p2 = projection_by_hand(-1.0 * X2.xi, 1) * z2;
    const double x0[3] = {X1.tau - X2.tau, X1.xi.x - X2.xi.x, X1.xi.y - X2.xi.y};
    auto low = [&](int mu) { return (mu == 0 ? -1.0 : 1.0) * (p2.adjoint() * pauli(mu) * p1)(0, 0); };
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const cplx expect = x0[k] * low(l) - x0[l] * low(k);
        EXPECT_LT(std::abs(sigma_kl_symbol(X1, X2, 1, -1, z1, z2, k, l) - expect), 1e-12);
      }
  }
  EXPECT_THROW(sigma_kl_symbol({}, {}, 1, 1, Spin(1, 0), Spin(1, 0), 3, 0), UsageError);
}

TEST(AnglesLemma, NullInteraction) {
  const Vec2 w = unit_vector(0.7);
  const SpaceTimePoint X1{-2.0, 2.0 * w}, X2{-1.0, w};
  const auto b = BilinearInteraction::make(X1, X2, 1, 1, 1);
  EXPECT_NEAR(b.max_abs_h(), 0.0, 1e-14);
  const auto r = angles_lemma_bound(b);
  EXPECT_NEAR(r.theta12, 0.0, 1e-7);
  EXPECT_NEAR(r.b_min_theta12_sq, 0.0, 1e-13);
  EXPECT_NEAR(r.b_product_over_xi0, 0.0, 1e-13);
  EXPECT_NEAR(r.b_xi0_min_theta0_sq, 0.0, 1e-13);
  EXPECT_EQ(r.b_xi0_sign_mismatch, 0.0);
}

TEST(AnglesLemma, SeparatedBranch) {
  // Opposite signs, |xi0| small against |xi1| ~ |xi2|.
  const SpaceTimePoint X1{0.3, {10.0, 0.0}}, X2{0.1, {9.5, 0.5}};
  const auto b = BilinearInteraction::make(X1, X2, 1, 1, -1);
  const auto r = angles_lemma_bound(b);
  EXPECT_TRUE(r.separated_branch);
  EXPECT_GT(r.theta12, kPi / 2);  // theta12 ~ 1
  EXPECT_GE(r.max_h, 0.5 * r.b_min_xi);
}

TEST(AnglesLemma, DegenerateXi0) {
  const SpaceTimePoint X{0.2, {1.0, 1.0}};
  const auto r = angles_lemma_bound(BilinearInteraction::make(X, X, 1, 1, 1));
  EXPECT_TRUE(r.degenerate_xi0);
  EXPECT_THROW(angles_lemma_bound(BilinearInteraction::make({0, {0, 0}}, X, 1, 1, 1)), ConstraintViolation);
}
