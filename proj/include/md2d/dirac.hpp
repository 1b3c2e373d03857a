#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "md2d/error.hpp"
#include "md2d/geometry.hpp"

namespace md2d {

using Mat2 = Eigen::Matrix2cd;
using Spin = Eigen::Vector2cd;

/// @brief alpha^0 = I, alpha^1 = sigma^1, alpha^2 = sigma^2, beta = sigma^3.
struct DiracMatrices {
  Mat2 alpha0, alpha1, alpha2, beta;

  static const DiracMatrices& standard() {
    static const DiracMatrices m = [] {
      using c = std::complex<double>;
      DiracMatrices d;
      d.alpha0 << c(1), c(0), c(0), c(1);
      d.alpha1 << c(0), c(1), c(1), c(0);
      d.alpha2 << c(0), c(0, -1), c(0, 1), c(0);
      d.beta << c(1), c(0), c(0), c(-1);
      return d;
    }();
    return m;
  }
  /// Upper-index alpha^mu.
  const Mat2& alpha(int mu) const { return mu == 0 ? alpha0 : (mu == 1 ? alpha1 : alpha2); }
};

/// Metric diag(-1, 1, 1).
inline constexpr double metric(int mu) { return mu == 0 ? -1.0 : 1.0; }

/// <a, b> = b^* a, linear in the first slot.
inline std::complex<double> inner(const Spin& a, const Spin& b) { return b.dot(a); }

/// Pi(xi) = (I + (xi^j/|xi|) alpha_j) / 2 evaluated at sign * xi.
inline Mat2 dirac_projection_symbol(Vec2 xi, int sign) {
  const double r = norm(xi);
  if (r == 0.0) throw ConstraintViolation("dirac_projection_symbol: xi = 0 has no direction");
  const double s = sign >= 0 ? 1.0 : -1.0;
  const double c1 = s * xi.x / r, c2 = s * xi.y / r;
  using c = std::complex<double>;
  Mat2 m;
  m << c(0.5), c(0.5 * c1, -0.5 * c2), c(0.5 * c1, 0.5 * c2), c(0.5);
  return m;
}

/// Projection used on the lattice: zero frequency gets I/2.
inline Mat2 projection_or_half(Vec2 xi, int sign) {
  if (xi.x == 0.0 && xi.y == 0.0) return 0.5 * Mat2::Identity();
  return dirac_projection_symbol(xi, sign);
}

// ---------------------------------------------------------------------------
// Bilinear interactions

struct SpaceTimePoint {
  double tau = 0.0;
  Vec2 xi;
};

/// @brief (X0, X1, X2) with X0 = X1 - X2 and signs (s0, s1, s2) in {+1, -1}.
struct BilinearInteraction {
  SpaceTimePoint X0, X1, X2;
  int s0 = 1, s1 = 1, s2 = 1;

  static BilinearInteraction make(SpaceTimePoint X1, SpaceTimePoint X2, int s0, int s1, int s2) {
    BilinearInteraction b;
    b.X1 = X1;
    b.X2 = X2;
    b.X0 = {X1.tau - X2.tau, X1.xi - X2.xi};
    b.s0 = s0;
    b.s1 = s1;
    b.s2 = s2;
    return b;
  }

  const SpaceTimePoint& X(int j) const { return j == 0 ? X0 : (j == 1 ? X1 : X2); }
  int sign(int j) const { return j == 0 ? s0 : (j == 1 ? s1 : s2); }
  /// Hyperbolic weight h_j = tau_j + s_j |xi_j|.
  double h(int j) const { return X(j).tau + sign(j) * norm(X(j).xi); }
  double max_abs_h() const { return std::max({std::abs(h(0)), std::abs(h(1)), std::abs(h(2))}); }
  /// theta_jk = angle(s_j xi_j, s_k xi_k).
  double theta(int j, int k) const { return angle(sign(j) * X(j).xi, sign(k) * X(k).xi); }
};

/// The sign table: (+,+) gives + iff |xi1| > |xi2|, (+,-) gives +; the other two
/// sign pairs reverse all three signs.
inline int classify_sign_pm12(const BilinearInteraction& b) {
  const double r1 = norm(b.X1.xi), r2 = norm(b.X2.xi);
  if (r1 == 0.0 || r2 == 0.0) throw ConstraintViolation("classify_sign_pm12: zero frequency");
  if (b.s1 > 0 && b.s2 > 0) return r1 > r2 ? 1 : -1;
  if (b.s1 > 0 && b.s2 < 0) return 1;
  if (b.s1 < 0 && b.s2 < 0) return r1 > r2 ? -1 : 1;
  return -1;
}

/// Lower bounds for max|h_j| and the comparability ratios of the angle lemmas.
struct AnglesLemmaBounds {
  double max_h = 0.0;
  double theta12 = 0.0, theta01 = 0.0, theta02 = 0.0;
  int pm12 = 1;
  bool degenerate_xi0 = false;         // xi0 = 0: theta_0j undefined
  bool separated_branch = false;       // s1 != s2 and |xi0| << |xi1| ~ |xi2|
  double b_min_theta12_sq = 0.0;       // min(|xi1|,|xi2|) theta12^2
  double b_product_over_xi0 = 0.0;     // |xi1||xi2| theta12^2 / |xi0|
  double b_xi0_min_theta0_sq = 0.0;    // |xi0| min(theta01, theta02)^2
  double b_xi0_sign_mismatch = 0.0;    // |xi0| if s0 != pm12, else 0
  double b_min_xi = 0.0;               // min(|xi1|,|xi2|), relevant on the separated branch
  // Two-sided ratios, valid only when s0 == pm12 (NaN otherwise).
  double f1_min_angle_ratio = std::nan("");    // min(theta0j) / ((min|xi|/|xi0|) sin theta12)
  double f1_max_angle_ratio = std::nan("");    // max(theta0j) / theta12, when also s1 != s2
  double f3_equivalence_ratio = std::nan("");  // (|xi1||xi2|theta12^2/|xi0|) / (min|xi_j| max(theta0j)^2), s1 == s2
  double f3_upper = std::nan("");              // min(|xi0|,|xi1|,|xi2|) max(theta0j)^2, s1 == s2
};

/// Threshold for "|xi0| << min(|xi1|,|xi2|)" on the separated branch.
inline constexpr double kSeparatedBranchFactor = 0.25;

inline AnglesLemmaBounds angles_lemma_bound(const BilinearInteraction& b) {
  AnglesLemmaBounds r;
  const double a0 = norm(b.X0.xi), a1 = norm(b.X1.xi), a2 = norm(b.X2.xi);
  if (a1 == 0.0 || a2 == 0.0) throw ConstraintViolation("angles_lemma_bound: xi1 and xi2 must be nonzero");
  r.max_h = b.max_abs_h();
  r.theta12 = b.theta(1, 2);
  r.pm12 = classify_sign_pm12(b);
  const double mn = std::min(a1, a2);
  r.b_min_xi = mn;
  r.b_min_theta12_sq = mn * r.theta12 * r.theta12;
  if (a0 == 0.0) {
    r.degenerate_xi0 = true;
    return r;
  }
  r.theta01 = b.theta(0, 1);
  r.theta02 = b.theta(0, 2);
  const double tmin = std::min(r.theta01, r.theta02), tmax = std::max(r.theta01, r.theta02);
  r.separated_branch = (b.s1 != b.s2) && a0 <= kSeparatedBranchFactor * mn;
  r.b_product_over_xi0 = a1 * a2 * r.theta12 * r.theta12 / a0;
  r.b_xi0_min_theta0_sq = a0 * tmin * tmin;
  r.b_xi0_sign_mismatch = (b.s0 != r.pm12) ? a0 : 0.0;
  if (b.s0 == r.pm12) {
    const double denom = (mn / a0) * std::sin(r.theta12);
    if (denom > 0.0) r.f1_min_angle_ratio = tmin / denom;
    if (b.s1 != b.s2 && r.theta12 > 0.0) r.f1_max_angle_ratio = tmax / r.theta12;
    if (b.s1 == b.s2) {
      const double m3 = std::min({a0, a1, a2});
      r.f3_upper = m3 * tmax * tmax;
      if (r.f3_upper > 0.0) r.f3_equivalence_ratio = r.b_product_over_xi0 / r.f3_upper;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quadrilinear symbol q_1234

struct QuadInteraction {
  std::array<Vec2, 4> e;
  std::array<Spin, 4> z;

  double theta(int j, int k) const { return angle(e[j - 1], e[k - 1]); }
  double phi() const { return std::min({theta(1, 3), theta(1, 4), theta(2, 3), theta(2, 4)}); }
};

/// q = <alpha^mu Pi(e1) z1, Pi(e2) z2> <alpha_mu Pi(e3) z3, Pi(e4) z4>, metric diag(-1,1,1).
inline std::complex<double> q1234_symbol(const QuadInteraction& q) {
  const auto& D = DiracMatrices::standard();
  const Spin p1 = dirac_projection_symbol(q.e[0], 1) * q.z[0];
  const Spin p2 = dirac_projection_symbol(q.e[1], 1) * q.z[1];
  const Spin p3 = dirac_projection_symbol(q.e[2], 1) * q.z[2];
  const Spin p4 = dirac_projection_symbol(q.e[3], 1) * q.z[3];
  std::complex<double> s = 0.0;
  for (int mu = 0; mu < 3; ++mu) s += metric(mu) * inner(D.alpha(mu) * p1, p2) * inner(D.alpha(mu) * p3, p4);
  return s;
}

/// theta12 theta34 + phi max(theta12, theta34) + phi^2.
inline double null_bound_q1234(const QuadInteraction& q) {
  const double t12 = q.theta(1, 2), t34 = q.theta(3, 4), p = q.phi();
  return t12 * t34 + p * std::max(t12, t34) + p * p;
}

/// theta13 theta24, the bound in the regimes where min(theta12, theta34) << phi.
inline double null_bound_q1234_regime(const QuadInteraction& q) { return q.theta(1, 3) * q.theta(2, 4); }

enum class NullRegime { phi_small, phi_between, phi_large };

/// Threshold for "<<" in the regime split.
inline constexpr double kNullRegimeFactor = 0.125;

/// phi <~ min(theta12,theta34); min << phi <~ max; max << phi.
inline NullRegime classify_null_regime(const QuadInteraction& q) {
  const double t12 = q.theta(1, 2), t34 = q.theta(3, 4), p = q.phi();
  const double mn = std::min(t12, t34), mx = std::max(t12, t34);
  if (mn > kNullRegimeFactor * p) return NullRegime::phi_small;
  if (mx > kNullRegimeFactor * p) return NullRegime::phi_between;
  return NullRegime::phi_large;
}

// ---------------------------------------------------------------------------
// Trilinear and sigma_{kappa lambda} symbols

/// sum_{j=1,2} <alpha^j Pi(s1 xi1) z1, Pi(s2 xi2) z2> g_j; g[0] is not used.
inline std::complex<double> sigma_trilinear_symbol(Vec2 xi1, Vec2 xi2, int s1, int s2, const Spin& z1, const Spin& z2,
                                                   const std::array<std::complex<double>, 3>& g) {
  const auto& D = DiracMatrices::standard();
  const Spin p1 = dirac_projection_symbol(xi1, s1) * z1;
  const Spin p2 = dirac_projection_symbol(xi2, s2) * z2;
  return inner(D.alpha1 * p1, p2) * g[1] + inner(D.alpha2 * p1, p2) * g[2];
}

/// sigma_{kl} = X0^k <alpha_l Pi z1, Pi z2> - X0^l <alpha_k Pi z1, Pi z2>, X0 = X1 - X2, X0^0 = tau0.
/// Index 0 selects the k0 kind; alpha_0 = -alpha^0.
inline std::complex<double> sigma_kl_symbol(const SpaceTimePoint& X1, const SpaceTimePoint& X2, int s1, int s2,
                                            const Spin& z1, const Spin& z2, int kappa, int lambda) {
  if (kappa < 0 || kappa > 2 || lambda < 0 || lambda > 2) throw UsageError("sigma_kl_symbol: index out of range");
  const auto& D = DiracMatrices::standard();
  const Spin p1 = dirac_projection_symbol(X1.xi, s1) * z1;
  const Spin p2 = dirac_projection_symbol(X2.xi, s2) * z2;
  const double X0[3] = {X1.tau - X2.tau, X1.xi.x - X2.xi.x, X1.xi.y - X2.xi.y};
  auto lowered = [&](int mu) { return metric(mu) * inner(D.alpha(mu) * p1, p2); };
  return X0[kappa] * lowered(lambda) - X0[lambda] * lowered(kappa);
}

}  // namespace md2d
