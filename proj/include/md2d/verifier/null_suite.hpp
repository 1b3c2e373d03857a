#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "md2d/dirac.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

// ---------------------------------------------------------------------------
// Random configurations. Angles are drawn from a mixture of uniform and
// log-uniformly clustered offsets so the degenerate limits are well sampled.

inline Spin random_spin(std::mt19937_64& g) {
  Spin z;
  for (int k = 0; k < 2; ++k) z[k] = {gaussian(g), gaussian(g)};
  return z / z.norm();
}

inline int random_sign(std::mt19937_64& g) { return uniform(g) < 0.5 ? 1 : -1; }

/// Random spinor, or with probability 1/2 the range vector of Pi(sign xi), where the
/// projected symbols attain their sup over unit spinors.
inline Spin sample_spin(std::mt19937_64& g, Vec2 xi, int sign) {
  const Spin z = random_spin(g);
  if (uniform(g) < 0.5) return z;
  const Spin p = dirac_projection_symbol(xi, sign) * z;
  const double n = p.norm();
  return n > 1e-8 ? Spin(p / n) : z;
}

/// Offset from an anchor direction: uniform, small, or small around the antipode.
inline double angle_offset(std::mt19937_64& g) {
  const double u = uniform(g);
  if (u < 0.3) return uniform(g, -kPi, kPi);
  const double small = log_uniform(g, 1e-5, 1.0) * random_sign(g);
  return u < 0.8 ? small : kPi + small;
}

/// e_j anchored at a random earlier direction (or fresh) plus an offset.
inline QuadInteraction random_quad(std::mt19937_64& g) {
  QuadInteraction q;
  std::array<double, 4> a{};
  a[0] = uniform(g, -kPi, kPi);
  for (int j = 1; j < 4; ++j) {
    const int anchor = static_cast<int>(uniform(g, 0.0, j + 1.0));
    a[j] = (anchor == j ? uniform(g, -kPi, kPi) : a[anchor]) + angle_offset(g);
  }
  const bool aligned = uniform(g) < 0.5;
  for (int j = 0; j < 4; ++j) {
    q.e[j] = unit_vector(a[j]);
    const Spin z = random_spin(g);
    q.z[j] = aligned ? Spin((dirac_projection_symbol(q.e[j], 1) * z).normalized()) : z;
  }
  return q;
}

inline const char* regime_name(NullRegime r) {
  switch (r) {
    case NullRegime::phi_small: return "phi_small";
    case NullRegime::phi_between: return "phi_between";
    case NullRegime::phi_large: return "phi_large";
  }
  return "";
}

/// xi with log-uniform magnitude in [1e-2, 1e2] and direction anchored at phi.
inline Vec2 random_frequency(std::mt19937_64& g, double phi) {
  return unit_vector(phi) * log_uniform(g, 1e-2, 1e2);
}

/// Hyperbolic weight: zero, tiny, or order |xi|, with random sign.
inline double random_weight(std::mt19937_64& g, double scale) {
  const double u = uniform(g);
  if (u < 0.2) return 0.0;
  return random_sign(g) * scale * log_uniform(g, 1e-6, 2.0);
}

/// Bilinear interaction with X_j placed near the cones of the chosen signs.
inline BilinearInteraction random_interaction(std::mt19937_64& g) {
  const int s0 = random_sign(g), s1 = random_sign(g), s2 = random_sign(g);
  const double a1 = uniform(g, -kPi, kPi);
  Vec2 xi1 = random_frequency(g, a1);
  Vec2 xi2 = random_frequency(g, a1 + angle_offset(g));
  if (uniform(g) < 0.25) xi2 = xi2 * (norm(xi1) / norm(xi2) * (1.0 + 1e-3 * gaussian(g)));
  const double sc = std::max(norm(xi1), norm(xi2));
  double h1 = random_weight(g, sc), h2 = random_weight(g, sc);
  if (uniform(g) < 0.4) {
    // h0 - h1 + h2 = delta is fixed by the frequencies; equal |h_j| = |delta|/3 minimizes max|h_j|.
    const double delta = s0 * norm(xi1 - xi2) - s1 * norm(xi1) + s2 * norm(xi2);
    auto jitter = [&g] { return uniform(g) < 0.5 ? 1.0 : 1.0 + random_sign(g) * log_uniform(g, 1e-6, 0.1); };
    h1 = -delta / 3.0 * jitter();
    h2 = delta / 3.0 * jitter();
  }
  const SpaceTimePoint X1{-s1 * norm(xi1) + h1, xi1};
  const SpaceTimePoint X2{-s2 * norm(xi2) + h2, xi2};
  return BilinearInteraction::make(X1, X2, s0, s1, s2);
}

inline bool xi0_usable(const BilinearInteraction& b) { return norm(b.X0.xi) > 1e-9 * norm(b.X1.xi); }

// ---------------------------------------------------------------------------
// Checks

inline std::vector<CheckSpec> null_lemma1_checks() {
  return {{"NullLemma1", [](std::mt19937_64& g, std::uint64_t) {
             const QuadInteraction q = random_quad(g);
             return Sample{std::abs(q1234_symbol(q)), null_bound_q1234(q), regime_name(classify_null_regime(q))};
           }}};
}

inline std::vector<CheckSpec> null_lemma2_checks() {
  return {{"NullLemma2", [](std::mt19937_64& g, std::uint64_t) {
             for (;;) {
               const QuadInteraction q = random_quad(g);
               const NullRegime r = classify_null_regime(q);
               if (r == NullRegime::phi_small) continue;
               return Sample{std::abs(q1234_symbol(q)), null_bound_q1234_regime(q), regime_name(r)};
             }
           }}};
}

inline std::vector<CheckSpec> angles_lemma_checks() {
  std::vector<CheckSpec> c;
  c.push_back({"AnglesLemma.min_xi_theta12_sq", [](std::mt19937_64& g, std::uint64_t) {
                 const auto b = random_interaction(g);
                 const auto r = angles_lemma_bound(b);
                 return Sample{r.b_min_theta12_sq, r.max_h};
               }});
  c.push_back({"AnglesLemma.product_over_xi0", [](std::mt19937_64& g, std::uint64_t) {
                 const auto b = random_interaction(g);
                 if (!xi0_usable(b)) return Sample{0, 0, "", true};
                 const auto r = angles_lemma_bound(b);
                 if (r.separated_branch) return Sample{0, 0, "", true};
                 return Sample{r.b_product_over_xi0, r.max_h};
               }});
  // Separated branch: draw xi2 close to xi1 with opposite sign so |xi0| << |xi1| ~ |xi2|.
  auto separated = [](std::mt19937_64& g) {
    for (;;) {
      const int s1 = random_sign(g), s0 = random_sign(g);
      const double a = uniform(g, -kPi, kPi);
      const Vec2 xi1 = random_frequency(g, a);
      const Vec2 d = unit_vector(uniform(g, -kPi, kPi)) * (norm(xi1) * log_uniform(g, 1e-4, 0.2));
      const Vec2 xi2 = xi1 - d;
      const double sc = norm(xi1);
      const SpaceTimePoint X1{-s1 * norm(xi1) + random_weight(g, sc), xi1};
      const SpaceTimePoint X2{s1 * norm(xi2) + random_weight(g, sc), xi2};
      const auto b = BilinearInteraction::make(X1, X2, s0, s1, -s1);
      const auto r = angles_lemma_bound(b);
      if (r.separated_branch) return std::pair{b, r};
    }
  };
  c.push_back({"AnglesLemma.separated_min_xi", [separated](std::mt19937_64& g, std::uint64_t) {
                 const auto [b, r] = separated(g);
                 return Sample{r.b_min_xi, r.max_h};
               }});
  c.push_back({"AnglesLemma.separated_theta12", [separated](std::mt19937_64& g, std::uint64_t) {
                 const auto [b, r] = separated(g);
                 return Sample{r.theta12, 1.0};
               },
               Mode::calibrated, true});
  return c;
}

inline std::vector<CheckSpec> f_lemma_checks() {
  std::vector<CheckSpec> c;
  // Interactions with s0 = pm12, so the F:Lemma1/3 statements apply.
  auto matched = [](std::mt19937_64& g) {
    for (;;) {
      auto b = random_interaction(g);
      if (!xi0_usable(b)) continue;
      b.s0 = classify_sign_pm12(b);
      return std::pair{b, angles_lemma_bound(b)};
    }
  };
  c.push_back({"FLemma1.min_angle", [matched](std::mt19937_64& g, std::uint64_t) {
                 const auto [b, r] = matched(g);
                 const double mn = std::min(norm(b.X1.xi), norm(b.X2.xi));
                 const double rhs = mn / norm(b.X0.xi) * std::sin(r.theta12);
                 if (!(rhs > 0.0)) return Sample{0, 0, "", true};
                 return Sample{std::min(r.theta01, r.theta02), rhs};
               },
               Mode::calibrated, true});
  c.push_back({"FLemma1.max_angle", [matched](std::mt19937_64& g, std::uint64_t) {
                 for (;;) {
                   const auto [b, r] = matched(g);
                   if (b.s1 == b.s2 || r.theta12 == 0.0) continue;
                   return Sample{std::max(r.theta01, r.theta02), r.theta12};
                 }
               },
               Mode::calibrated, true});
  // theta_0(longer) <= theta_0(shorter); checked as a bare inequality.
  c.push_back({"FLemma1.ordering", [matched](std::mt19937_64& g, std::uint64_t) {
                 const auto [b, r] = matched(g);
                 const bool first_short = norm(b.X1.xi) <= norm(b.X2.xi);
                 const double t_short = first_short ? r.theta01 : r.theta02;
                 const double t_long = first_short ? r.theta02 : r.theta01;
                 if (t_short == 0.0) return Sample{0, 0, "", true};
                 return Sample{t_long, t_short};
               },
               Mode::absolute});
  c.push_back({"FLemma2", [](std::mt19937_64& g, std::uint64_t) {
                 for (;;) {
                   auto b = random_interaction(g);
                   if (!xi0_usable(b)) continue;
                   b.s0 = -classify_sign_pm12(b);
                   const auto r = angles_lemma_bound(b);
                   return Sample{r.b_xi0_sign_mismatch, r.max_h};
                 }
               }});
  c.push_back({"FLemma3.equivalence", [matched](std::mt19937_64& g, std::uint64_t) {
                 for (;;) {
                   const auto [b, r] = matched(g);
                   if (b.s1 != b.s2) continue;
                   if (!(r.f3_upper > 0.0)) return Sample{0, 0, "", true};
                   return Sample{r.b_product_over_xi0, r.f3_upper};
                 }
               },
               Mode::calibrated, true});
  c.push_back({"FLemma3.upper", [matched](std::mt19937_64& g, std::uint64_t) {
                 for (;;) {
                   const auto [b, r] = matched(g);
                   if (b.s1 != b.s2) continue;
                   return Sample{r.f3_upper, r.max_h};
                 }
               }});
  c.push_back({"FLemma4", [](std::mt19937_64& g, std::uint64_t) {
                 for (;;) {
                   const auto b = random_interaction(g);
                   if (!xi0_usable(b)) continue;
                   const auto r = angles_lemma_bound(b);
                   return Sample{r.b_xi0_min_theta0_sq, r.max_h};
                 }
               }});
  return c;
}

/// g with the divergence relation built in: rho_hat = |xi0|^{1/2} (xi0 . g).
inline std::vector<CheckSpec> sigma_trilinear_checks() {
  return {{"SigmaTrilinear", [](std::mt19937_64& g, std::uint64_t) {
             for (;;) {
               const auto b = random_interaction(g);
               if (!xi0_usable(b)) continue;
               const std::array<std::complex<double>, 3> gv{0.0, {gaussian(g), gaussian(g)}, {gaussian(g), gaussian(g)}};
               const Vec2 xi0 = b.X0.xi;
               const double a0 = norm(xi0);
               const double gnorm = std::sqrt(std::norm(gv[1]) + std::norm(gv[2]));
               const std::complex<double> rho = std::sqrt(a0) * (xi0.x * gv[1] + xi0.y * gv[2]);
               const double t12 = b.theta(1, 2), t01 = b.theta(0, 1), t02 = b.theta(0, 2);
               const double rhs = t12 * gnorm + std::min(t01, t02) * gnorm + std::pow(a0, -1.5) * std::abs(rho);
               const double lhs = std::abs(sigma_trilinear_symbol(b.X1.xi, b.X2.xi, b.s1, b.s2, sample_spin(g, b.X1.xi, b.s1),
                                                                    sample_spin(g, b.X2.xi, b.s2), gv));
               return Sample{lhs, rhs};
             }
           }}};
}

inline std::vector<CheckSpec> n_lemma_checks() {
  auto draw = [](std::mt19937_64& g) {
    for (;;) {
      const auto b = random_interaction(g);
      if (xi0_usable(b)) return b;
    }
  };
  std::vector<CheckSpec> c;
  c.push_back({"NLemma.spatial", [draw](std::mt19937_64& g, std::uint64_t) {
                 const auto b = draw(g);
                 const double a0 = norm(b.X0.xi);
                 const double rhs = a0 * b.theta(1, 2) + a0 * std::min(b.theta(0, 1), b.theta(0, 2));
                 const double lhs = std::abs(sigma_kl_symbol(b.X1, b.X2, b.s1, b.s2, sample_spin(g, b.X1.xi, b.s1),
                                                   sample_spin(g, b.X2.xi, b.s2), 1, 2));
                 return Sample{lhs, rhs};
               }});
  c.push_back({"NLemma.mixed", [draw](std::mt19937_64& g, std::uint64_t) {
                 const auto b = draw(g);
                 const double a0 = norm(b.X0.xi);
                 const double rhs =
                     a0 * b.theta(1, 2) + a0 * std::min(b.theta(0, 1), b.theta(0, 2)) + std::abs(b.h(0));
                 const int k = uniform(g) < 0.5 ? 1 : 2;
                 const double lhs = std::abs(sigma_kl_symbol(b.X1, b.X2, b.s1, b.s2, sample_spin(g, b.X1.xi, b.s1),
                                                   sample_spin(g, b.X2.xi, b.s2), k, 0));
                 return Sample{lhs, rhs, k == 1 ? "k=1" : "k=2"};
               }});
  return c;
}

}  // namespace md2d::verify
