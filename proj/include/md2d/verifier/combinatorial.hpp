#pragma once

#include <vector>

#include "md2d/geometry.hpp"
#include "md2d/spectral.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

/// Omega(gamma) by index: direction k is unit_vector(k * step), step = 2 pi / K.
struct OmegaIndex {
  double gamma;
  int K;
  double step;

  explicit OmegaIndex(double g)
      : gamma(g), K(static_cast<int>(omega_family(g).size())), step(2.0 * kPi / K) {}

  Vec2 dir(int k) const { return unit_vector(k * step); }

  /// Indices k with xi in Gamma_gamma(omega_k), i.e. angle(xi, omega_k) <= gamma.
  std::vector<int> members(Vec2 xi) const {
    const double phi = std::atan2(xi.y, xi.x);
    const long c = std::lround(phi / step);
    const long m = static_cast<long>(std::ceil(gamma / step)) + 1;
    std::vector<int> out;
    for (long o = -m; o <= m; ++o) {
      const int k = static_cast<int>(((c + o) % K + K) % K);
      if (std::find(out.begin(), out.end(), k) != out.end()) continue;
      if (angle(xi, dir(k)) <= gamma) out.push_back(k);
    }
    return out;
  }
};

inline double omega_angle(const OmegaIndex& om, int a, int b) { return angle(om.dir(a), om.dir(b)); }

// ---------------------------------------------------------------------------
// Hyperplane counting: #{omega in Omega(gamma) : |tau + xi.omega| <= d} <= C (1 + (d / N gamma^2)^{1/2})

inline constexpr double kHyperConstant = 3.0 * kPi;

inline int hyperplane_count(double tau, Vec2 xi, double d, double gamma) {
  const OmegaIndex om(gamma);
  int c = 0;
  for (int k = 0; k < om.K; ++k)
    if (std::abs(tau + dot(xi, om.dir(k))) <= d) ++c;
  return c;
}

inline double hyperplane_bound(double N, double d, double gamma) {
  return 1.0 + std::sqrt(d / (N * gamma * gamma));
}

inline CheckSpec hyper_lemma_check() {
  return {"HyperLemma", [](std::mt19937_64& r, std::uint64_t) {
            const double N = std::ldexp(1.0, static_cast<int>(uniform(r, 0.0, 7.0)));
            const double gamma = log_uniform(r, 0.02, kPi);
            const double d = log_uniform(r, 1e-3 * N, 4.0 * N);
            const Vec2 xi = unit_vector(uniform(r, -kPi, kPi)) * uniform(r, N, 2.0 * N);
            const double k = norm(xi);
            double tau = 0.0;
            const double u = uniform(r);
            const char* tag = "generic";
            if (u < 0.3) {
              tau = (uniform(r) < 0.5 ? 1.0 : -1.0) * k + uniform(r, -d, d);
              tag = "on_cone";
            } else if (u < 0.5) {
              tau = uniform(r, -d, d);
              tag = "transverse";
            } else {
              tau = uniform(r, -3.0 * k, 3.0 * k);
            }
            const int c = hyperplane_count(tau, xi, d, gamma);
            return Sample{double(c), kHyperConstant * hyperplane_bound(N, d, gamma), tag};
          },
          Mode::absolute};
}

// ---------------------------------------------------------------------------
// Angular Whitney decompositions

/// Sum over dyadic gamma < 1 and omega_j in Omega(gamma) with xi_j in Gamma_gamma(omega_j)
/// and 3 gamma <= theta(omega_1, omega_2) <= 12 gamma.
inline int whitney1_sum(Vec2 xi1, Vec2 xi2) {
  const double theta = angle(xi1, xi2);
  if (!(theta > 0.0)) throw ConstraintViolation("whitney1_sum: frequencies must not be collinear");
  int total = 0;
  for (int j = 1;; ++j) {
    const double gamma = std::ldexp(1.0, -j);
    if (gamma < theta / 14.0) break;
    if (gamma > theta) continue;
    const OmegaIndex om(gamma);
    const auto a = om.members(xi1);
    const auto b = om.members(xi2);
    for (int p : a)
      for (int q : b) {
        const double t = omega_angle(om, p, q);
        if (t >= 3.0 * gamma && t <= 12.0 * gamma) ++total;
      }
  }
  return total;
}

/// Sum over omega_j in Omega(gamma) with xi_j in Gamma_gamma(omega_j) and theta(omega_1, omega_2) <= (k + 2) gamma.
inline int whitney2_sum(Vec2 xi1, Vec2 xi2, double gamma, int k) {
  const OmegaIndex om(gamma);
  int total = 0;
  for (int p : om.members(xi1))
    for (int q : om.members(xi2))
      if (omega_angle(om, p, q) <= (k + 2) * gamma) ++total;
  return total;
}

inline constexpr double kWhitneyUpper = 36.0;

inline CheckSpec whitney1_check() {
  CheckSpec c{"WhitneyLemma1", [](std::mt19937_64& r, std::uint64_t) {
                const double phi = uniform(r, -kPi, kPi);
                const double theta = uniform(r) < 0.2 ? kPi * (1.0 - log_uniform(r, 1e-9, 1e-2)) : log_uniform(r, 1e-3, kPi);
                const Vec2 xi1 = unit_vector(phi) * log_uniform(r, 1e-2, 1e2);
                const Vec2 xi2 = unit_vector(phi + theta) * log_uniform(r, 1e-2, 1e2);
                return Sample{double(whitney1_sum(xi1, xi2)), 1.0};
              },
              Mode::range};
  c.lo = 1.0;
  c.hi = kWhitneyUpper;
  return c;
}

inline CheckSpec whitney2_check() {
  return {"WhitneyLemma2", [](std::mt19937_64& r, std::uint64_t) {
            const int k = uniform(r) < 0.5 ? 1 : 2;
            const double gamma = log_uniform(r, 0.01, kPi / k);
            const double phi = uniform(r, -kPi, kPi);
            const double theta = std::min(kPi, uniform(r) < 0.3 ? k * gamma : uniform(r, 0.0, k * gamma));
            const Vec2 xi1 = unit_vector(phi);
            const Vec2 xi2 = unit_vector(phi + theta) * log_uniform(r, 0.1, 10.0);
            return Sample{1.0, double(whitney2_sum(xi1, xi2, gamma, k)), k == 1 ? "k=1" : "k=2"};
          },
          Mode::absolute};
}

// ---------------------------------------------------------------------------
// K^pm_{N,L,gamma}(omega) inside H_{C max(L, N gamma^2)}(omega)

inline constexpr double kInclusionConstant = 3.0;

/// Point of K^pm_{N,L,gamma}(omega): <xi> ~ N, <tau pm |xi|> ~ L, pm xi in Gamma_gamma(omega).
inline void sample_k_point(std::mt19937_64& r, double N, double L, double gamma, Vec2 omega, int sign, bool edge,
                           double& tau, Vec2& xi) {
  const double rho_lo = std::sqrt(std::max(N * N - 1.0, 0.0)), rho_hi = std::sqrt(4.0 * N * N - 1.0);
  const double h_lo = std::sqrt(std::max(L * L - 1.0, 0.0)), h_hi = std::sqrt(4.0 * L * L - 1.0);
  const double rho = edge ? rho_hi * (1.0 - 1e-12) : uniform(r, rho_lo, rho_hi);
  const double h = (edge ? h_hi * (1.0 - 1e-12) : uniform(r, h_lo, h_hi)) * (uniform(r) < 0.5 ? 1.0 : -1.0);
  const double dphi = edge ? gamma * (uniform(r) < 0.5 ? 1.0 : -1.0) : uniform(r, -gamma, gamma);
  const double a0 = std::atan2(omega.y, omega.x);
  xi = sign * unit_vector(a0 + dphi) * rho;
  tau = h - sign * rho;
}

inline CheckSpec set_inclusion_check() {
  return {"ShellInclusion", [](std::mt19937_64& r, std::uint64_t) {
            const double N = std::ldexp(1.0, static_cast<int>(uniform(r, 0.0, 7.0)));
            const double L = std::ldexp(1.0, static_cast<int>(uniform(r, 0.0, 7.0)));
            const double gamma = uniform(r) < 0.1 ? kPi : log_uniform(r, 1e-3, kPi);
            const Vec2 omega = unit_vector(uniform(r, -kPi, kPi));
            const int sign = uniform(r) < 0.5 ? 1 : -1;
            const bool edge = uniform(r) < 0.2;
            double tau;
            Vec2 xi;
            sample_k_point(r, N, L, gamma, omega, sign, edge, tau, xi);
            const double lhs = std::abs(tau + dot(xi, omega));
            return Sample{lhs, kInclusionConstant * std::max(L, N * gamma * gamma), edge ? "edge" : "interior"};
          },
          Mode::absolute};
}

// ---------------------------------------------------------------------------
// Sector sums over Omega(gamma)

inline constexpr double kOmegaSumConstant = 5.0;

/// Sparse field: nonzero frequencies with coefficients.
struct SparseField {
  std::vector<Vec2> xi;
  std::vector<cplx> c;

  double norm2() const {
    double s = 0.0;
    for (const auto& v : c) s += std::norm(v);
    return s;
  }
};

inline SparseField random_sparse_field(std::mt19937_64& r, int modes = 64) {
  SparseField f;
  const double a0 = uniform(r, -kPi, kPi);
  const double spread = uniform(r) < 0.5 ? kPi : log_uniform(r, 1e-2, 1.0);
  for (int i = 0; i < modes; ++i) {
    f.xi.push_back(unit_vector(a0 + uniform(r, -spread, spread)) * log_uniform(r, 0.1, 100.0));
    f.c.push_back(log_uniform(r, 1e-2, 1e2) * cplx(gaussian(r), gaussian(r)));
  }
  return f;
}

/// ||P_{Gamma_gamma(omega)} u||^2 for every omega in Omega(gamma).
inline std::vector<double> sector_energies(const SparseField& f, const OmegaIndex& om) {
  std::vector<double> e(om.K, 0.0);
  for (std::size_t i = 0; i < f.xi.size(); ++i)
    for (int k : om.members(f.xi[i])) e[k] += std::norm(f.c[i]);
  return e;
}

struct OmegaSumTerms {
  double pair_sum = 0.0;  // sum over theta(omega1, omega2) <= k gamma of ||u1^omega1|| ||u2^omega2||
  double sector1 = 0.0, sector2 = 0.0;  // sum over omega of ||u_j^omega||^2
  int max_cardinality = 0;  // max over omega2 of #{omega1 : theta(omega1, omega2) <= k gamma}
};

inline OmegaSumTerms omega_sum_terms(const SparseField& u1, const SparseField& u2, double gamma, int k) {
  const OmegaIndex om(gamma);
  const auto e1 = sector_energies(u1, om), e2 = sector_energies(u2, om);
  OmegaSumTerms t;
  for (int q = 0; q < om.K; ++q) {
    t.sector1 += e1[q];
    t.sector2 += e2[q];
    int card = 0;
    for (int p = 0; p < om.K; ++p) {
      if (omega_angle(om, p, q) > k * gamma * (1.0 + 1e-12)) continue;
      ++card;
      t.pair_sum += std::sqrt(e1[p] * e2[q]);
    }
    t.max_cardinality = std::max(t.max_cardinality, card);
  }
  return t;
}

struct OmegaSumDraw {
  SparseField u1, u2;
  double gamma;
  int k;
};

inline OmegaSumDraw random_omega_sum_draw(std::mt19937_64& r) {
  OmegaSumDraw d;
  d.k = uniform(r) < 0.5 ? 1 : 2;
  d.gamma = log_uniform(r, 0.05, kPi);
  d.u1 = random_sparse_field(r);
  d.u2 = uniform(r) < 0.5 ? d.u1 : random_sparse_field(r);
  return d;
}

inline std::vector<CheckSpec> omega_sum_checks() {
  std::vector<CheckSpec> c;
  c.push_back({"OmegaSum", [](std::mt19937_64& r, std::uint64_t) {
                 const auto d = random_omega_sum_draw(r);
                 const auto t = omega_sum_terms(d.u1, d.u2, d.gamma, d.k);
                 return Sample{t.pair_sum, kOmegaSumConstant * std::sqrt(t.sector1 * t.sector2), d.k == 1 ? "k=1" : "k=2"};
               },
               Mode::absolute});
  c.push_back({"OmegaSum.cardinality", [](std::mt19937_64& r, std::uint64_t) {
                 const auto d = random_omega_sum_draw(r);
                 const auto t = omega_sum_terms(d.u1, d.u2, d.gamma, d.k);
                 return Sample{double(t.max_cardinality), 2.0 * d.k + 1.0};
               },
               Mode::absolute});
  CheckSpec zero{"OmegaSum0", [](std::mt19937_64& r, std::uint64_t) {
                   const auto d = random_omega_sum_draw(r);
                   const auto e = sector_energies(d.u1, OmegaIndex(d.gamma));
                   double s = 0.0;
                   for (double v : e) s += v;
                   return Sample{s, d.u1.norm2()};
                 },
                 Mode::range};
  zero.lo = 1.0 - 1e-12;
  zero.hi = 3.0 * (1.0 + 1e-12);
  c.push_back(zero);
  c.push_back({"OmegaSum.literal", [](std::mt19937_64& r, std::uint64_t) {
                 const auto d = random_omega_sum_draw(r);
                 const auto t = omega_sum_terms(d.u1, d.u2, d.gamma, d.k);
                 return Sample{t.pair_sum, 3.0 * kOmegaSumConstant * std::sqrt(d.u1.norm2() * d.u2.norm2())};
               },
               Mode::absolute});
  return c;
}

inline std::vector<CheckSpec> combinatorial_checks() {
  std::vector<CheckSpec> c{hyper_lemma_check(), whitney1_check(), whitney2_check(), set_inclusion_check()};
  for (auto& s : omega_sum_checks()) c.push_back(std::move(s));
  return c;
}

}  // namespace md2d::verify
