#pragma once

#include <array>
#include <set>

#include "md2d/geometry.hpp"
#include "md2d/types.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

/// One spatial mode of (f, g, F) with F^(t, xi) = a exp(i tau t) exp(-t^2 / (2 sigma^2)).
struct EnergyMode {
  Vec2 xi;
  cplx f, g, a;
  double tau = 0.0;
};

enum class SourceFamily { free, on_cone, high_modulation, generic };

inline const char* family_name(SourceFamily s) {
  switch (s) {
    case SourceFamily::free: return "free";
    case SourceFamily::on_cone: return "on_cone";
    case SourceFamily::high_modulation: return "high_modulation";
    case SourceFamily::generic: return "generic";
  }
  return "";
}

struct EnergyTrial {
  SourceFamily family = SourceFamily::generic;
  double sigma = 1.0;
  std::vector<EnergyMode> modes;
};

/// Up to three distinct nonzero integer frequencies with |xi| <= kmax (box period 2 pi).
inline EnergyTrial random_energy_trial(std::mt19937_64& r, int kmax = 8) {
  EnergyTrial t;
  t.family = static_cast<SourceFamily>(static_cast<int>(uniform(r, 0.0, 4.0)));
  t.sigma = log_uniform(r, 0.2, 2.0);
  const int M = 1 + static_cast<int>(uniform(r, 0.0, 3.0));
  std::set<std::pair<int, int>> used;
  auto amp = [&r] {
    const double u = uniform(r);
    if (u < 0.25) return cplx(0.0);
    return log_uniform(r, 1e-2, 1e2) * cplx(gaussian(r), gaussian(r));
  };
  while (static_cast<int>(t.modes.size()) < M) {
    const int m1 = static_cast<int>(std::lround(uniform(r, -kmax, kmax)));
    const int m2 = static_cast<int>(std::lround(uniform(r, -kmax, kmax)));
    if ((m1 == 0 && m2 == 0) || std::hypot(m1, m2) > kmax || !used.insert({m1, m2}).second) continue;
    EnergyMode m;
    m.xi = {double(m1), double(m2)};
    const double k = norm(m.xi);
    m.f = amp();
    m.g = amp();
    m.a = t.family == SourceFamily::free ? cplx(0.0) : log_uniform(r, 1e-2, 1e2) * cplx(gaussian(r), gaussian(r));
    const int sgn = uniform(r) < 0.5 ? 1 : -1;
    switch (t.family) {
      case SourceFamily::free: break;
      case SourceFamily::on_cone: m.tau = sgn * (k + (uniform(r) < 0.3 ? 0.0 : uniform(r, -1.0, 1.0) * log_uniform(r, 1e-3, 0.5))); break;
      case SourceFamily::high_modulation: m.tau = sgn * (k + log_uniform(r, 5.0, 100.0)); break;
      case SourceFamily::generic: m.tau = uniform(r, -3.0 * k - 3.0, 3.0 * k + 3.0); break;
    }
    t.modes.push_back(m);
  }
  return t;
}

/// F~(tau, xi) for one mode: a sigma sqrt(2 pi) exp(-sigma^2 (tau - tau_m)^2 / 2).
inline double source_envelope_ft(const EnergyMode& m, double sigma, double tau) {
  const double d = tau - m.tau;
  return std::abs(m.a) * sigma * std::sqrt(2.0 * kPi) * std::exp(-0.5 * sigma * sigma * d * d);
}

/// int |F~(tau, xi)| / <|tau| - |xi|> dtau by composite Simpson over tau_m +- 12 / sigma.
inline double modulation_integral(const EnergyMode& m, double sigma, int panels = 4000) {
  if (m.a == cplx(0.0)) return 0.0;
  const double k = norm(m.xi);
  const double a = m.tau - 12.0 / sigma, b = m.tau + 12.0 / sigma;
  const double h = (b - a) / panels;
  auto f = [&](double tau) { return source_envelope_ft(m, sigma, tau) / jbracket(std::abs(tau) - k); };
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// sup_{|t| <= 1} ||u(t)||_{H^s} for s = s_values, leapfrog for u'' = -|xi|^2 u - F^ per mode.
inline std::vector<double> energy_sup_norms(const EnergyTrial& t, const std::vector<double>& s_values) {
  double fastest = 1.0 / t.sigma;
  for (const auto& m : t.modes) fastest = std::max({fastest, norm(m.xi), std::abs(m.tau)});
  const double h0 = std::min(1e-3, 0.02 / fastest);
  const long steps = static_cast<long>(std::ceil(1.0 / h0));
  const std::size_t M = t.modes.size();
  std::vector<double> sup(s_values.size(), 0.0);
  std::vector<std::vector<double>> w(s_values.size(), std::vector<double>(M));
  for (std::size_t i = 0; i < s_values.size(); ++i)
    for (std::size_t j = 0; j < M; ++j) w[i][j] = std::pow(1.0 + dot(t.modes[j].xi, t.modes[j].xi), s_values[i]);
  auto record = [&](const std::vector<cplx>& u) {
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < M; ++j) acc += w[i][j] * std::norm(u[j]);
      sup[i] = std::max(sup[i], std::sqrt(acc));
    }
  };
  auto F = [&t](const EnergyMode& m, double time) {
    return m.a * std::polar(1.0, m.tau * time) * std::exp(-0.5 * time * time / (t.sigma * t.sigma));
  };
  for (double dir : {1.0, -1.0}) {
    const double h = dir / steps;
    std::vector<cplx> prev(M), cur(M);
    for (std::size_t j = 0; j < M; ++j) {
      const auto& m = t.modes[j];
      const double k2 = dot(m.xi, m.xi);
      prev[j] = m.f;
      cur[j] = m.f + h * m.g + 0.5 * h * h * (-k2 * m.f - F(m, 0.0));
    }
    record(prev);
    record(cur);
    for (long n = 1; n < steps; ++n) {
      for (std::size_t j = 0; j < M; ++j) {
        const auto& m = t.modes[j];
        const cplx next = 2.0 * cur[j] - prev[j] + h * h * (-dot(m.xi, m.xi) * cur[j] - F(m, n * h));
        prev[j] = cur[j];
        cur[j] = next;
      }
      record(cur);
    }
  }
  return sup;
}

/// ||f||_{H^s} + ||g||_{H^{s-1}} + ||<xi>^{s-1} int |F~| / <|tau|-|xi|> dtau||_{L^2_xi}.
inline double energy_rhs(const EnergyTrial& t, double s) {
  double f2 = 0.0, g2 = 0.0, F2 = 0.0;
  for (const auto& m : t.modes) {
    const double b2 = 1.0 + dot(m.xi, m.xi);
    f2 += std::pow(b2, s) * std::norm(m.f);
    g2 += std::pow(b2, s - 1.0) * std::norm(m.g);
    const double I = modulation_integral(m, t.sigma);
    F2 += std::pow(b2, s - 1.0) * I * I;
  }
  return std::sqrt(f2) + std::sqrt(g2) + std::sqrt(F2);
}

inline const std::array<double, 3>& energy_s_values() {
  static const std::array<double, 3> s{0.0, -1.0, -1.5};
  return s;
}

inline std::vector<CheckSpec> energy_lemma_checks() {
  std::vector<CheckSpec> c;
  const std::array<const char*, 3> names{"EnergyLemma.s=0", "EnergyLemma.s=-1", "EnergyLemma.s=-3/2"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double s = energy_s_values()[i];
    c.push_back({names[i], [s](std::mt19937_64& r, std::uint64_t) {
                   const EnergyTrial t = random_energy_trial(r);
                   const double lhs = energy_sup_norms(t, {s})[0];
                   const double rhs = energy_rhs(t, s);
                   if (rhs == 0.0) return Sample{0, 0, family_name(t.family), true};
                   return Sample{lhs, rhs, family_name(t.family)};
                 }});
  }
  return c;
}

}  // namespace md2d::verify
