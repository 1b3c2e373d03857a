#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "md2d/dirac_fields.hpp"
#include "md2d/norms.hpp"
#include "md2d/rng.hpp"
#include "md2d/spectral.hpp"
#include "md2d/types.hpp"

namespace md2d {

// ---------------------------------------------------------------------------
// Generators

enum class Profile { gaussian, random_band };

/// Per-field data description.  For the gaussian profile `amplitude` is the peak value;
/// for random-band it is the L^2 norm.  momentum/polarization apply to the spinor only.
struct FieldSpec {
  std::uint64_t seed = 0;
  double amplitude = 0.0;
  Profile profile = Profile::gaussian;
  double band_min = 0.0;
  double band_max = 1.0;
  double width = 1.0;
  std::optional<Vec2> center;
  Vec2 momentum{0.0, 0.0};
  std::array<double, 2> polarization{1.0, 1.0};

  static FieldSpec band(std::uint64_t seed, double amplitude, double kmin, double kmax) {
    FieldSpec f;
    f.seed = seed;
    f.amplitude = amplitude;
    f.profile = Profile::random_band;
    f.band_min = kmin;
    f.band_max = kmax;
    return f;
  }
};

struct DataSpec {
  FieldSpec psi, E, B;
};

/// Gaussian random coefficients on band_min <= |xi| <= band_max.  Wavenumbers are visited in a
/// fixed order independent of n, so the same seed gives the same field on any grid that
/// resolves the band.  Modes outside the dealias mask are dropped.
inline ComplexField2D random_band_field(const Grid2D& g, std::uint64_t seed, std::uint64_t stream, double band_min,
                                        double band_max, bool real) {
  if (!(band_max > band_min) || band_min < 0.0) throw UsageError("random_band_field: need 0 <= band_min < band_max");
  std::mt19937_64 rng(derive_seed(seed, stream, 0));
  ComplexField2D f(g, Representation::fourier);
  const double dk = g.dk();
  const int M = static_cast<int>(std::ceil(band_max / dk));
  const int n = g.n();
  auto idx = [n](int m) { return m >= 0 ? m : m + n; };
  auto representable = [&](int m1, int m2) {
    return std::abs(m1) < n / 2 && std::abs(m2) < n / 2 && g.keeps(idx(m1), idx(m2));
  };
  for (int m1 = -M; m1 <= M; ++m1) {
    for (int m2 = -M; m2 <= M; ++m2) {
      const double r = dk * std::hypot(m1, m2);
      if (r < band_min || r > band_max) continue;
      if (real && (m1 < 0 || (m1 == 0 && m2 < 0))) continue;
      const double re = gaussian(rng), im = gaussian(rng);
      if (!representable(m1, m2)) continue;
      if (real && m1 == 0 && m2 == 0) {
        f.at(0, 0) = re;
        continue;
      }
      f.at(idx(m1), idx(m2)) = cplx(re, im);
      if (real) f.at(idx(-m1), idx(-m2)) = cplx(re, -im);
    }
  }
  return f;
}

inline void normalize_l2(ComplexField2D& f, double target) {
  const double nrm = l2_norm(f);
  if (nrm > 0.0) f *= cplx(target / nrm);
}

template <std::size_t K>
void normalize_l2(FieldArray<K>& f, double target) {
  const double nrm = l2_norm(f);
  if (nrm > 0.0)
    for (auto& c : f) c *= cplx(target / nrm);
}

/// Minimum-image displacement on the torus.
inline Vec2 periodic_offset(Vec2 x, Vec2 c, double L) {
  auto wrap = [L](double d) { return d - L * std::round(d / L); };
  return {wrap(x.x - c.x), wrap(x.y - c.y)};
}

inline Vec2 lattice_momentum(const Grid2D& g, Vec2 p) {
  const double dk = g.dk();
  return {dk * std::round(p.x / dk), dk * std::round(p.y / dk)};
}

inline ComplexField2D gaussian_bump(const Grid2D& g, const FieldSpec& s) {
  const Vec2 c = s.center.value_or(Vec2{g.box_period() / 2, g.box_period() / 2});
  const double w = s.width;
  return ComplexField2D::from_function(g, [&](Vec2 x) {
    const Vec2 d = periodic_offset(x, c, g.box_period());
    return cplx(std::exp(-dot(d, d) / (2.0 * w * w)));
  });
}

inline Spinor make_spinor(const Grid2D& g, const FieldSpec& s) {
  Spinor psi;
  if (s.amplitude == 0.0) {
    for (auto& c : psi) c = ComplexField2D(g, Representation::physical);
    return psi;
  }
  if (s.profile == Profile::random_band) {
    for (int c = 0; c < 2; ++c) psi[c] = random_band_field(g, s.seed, 10 + c, s.band_min, s.band_max, false);
    normalize_l2(psi, s.amplitude);
    return as_physical(psi);
  }
  const double pn = std::hypot(s.polarization[0], s.polarization[1]);
  if (pn == 0.0) throw UsageError("make_spinor: polarization must be nonzero");
  const Vec2 p = lattice_momentum(g, s.momentum);
  const Vec2 c = s.center.value_or(Vec2{g.box_period() / 2, g.box_period() / 2});
  const ComplexField2D bump = gaussian_bump(g, s);
  for (int k = 0; k < 2; ++k) {
    psi[k] = bump;
    const double pol = s.polarization[k] / pn;
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const Vec2 x = g.x(i, j);
        psi[k].at(i, j) *= s.amplitude * pol * std::polar(1.0, dot(p, x - c));
      }
    psi[k] = as_physical(dealias(psi[k]));
  }
  return psi;
}

inline VecField make_divfree_field(const Grid2D& g, const FieldSpec& s) {
  VecField e;
  if (s.amplitude == 0.0) {
    for (auto& c : e) c = ComplexField2D(g, Representation::physical);
    return e;
  }
  if (s.profile == Profile::random_band) {
    for (int c = 0; c < 2; ++c) e[c] = random_band_field(g, s.seed, 20 + c, s.band_min, s.band_max, true);
    e = div_free_project(e);
    normalize_l2(e, s.amplitude);
    return as_physical(e);
  }
  // Rotated gradient of a Gaussian stream function, scaled to peak |E| = amplitude.
  const ComplexField2D phi = dealias(gaussian_bump(g, s));
  e = {partial(phi, 1), -1.0 * partial(phi, 0)};
  e = as_physical(e);
  for (auto& c : e) c = real_part(c);
  double peak = 0.0;
  for (std::size_t k = 0; k < e[0].size(); ++k) peak = std::max(peak, std::hypot(e[0][k].real(), e[1][k].real()));
  for (auto& c : e) c *= cplx(s.amplitude / peak);
  return e;
}

inline ComplexField2D make_scalar_field(const Grid2D& g, const FieldSpec& s) {
  if (s.amplitude == 0.0) return ComplexField2D(g, Representation::physical);
  if (s.profile == Profile::random_band) {
    ComplexField2D b = random_band_field(g, s.seed, 30, s.band_min, s.band_max, true);
    normalize_l2(b, s.amplitude);
    return as_physical(b);
  }
  ComplexField2D b = as_physical(dealias(gaussian_bump(g, s)));
  b = real_part(b);
  b *= cplx(s.amplitude);
  return b;
}

inline ChargeClassData make_data(const Grid2D& g, const DataSpec& spec) {
  ChargeClassData d;
  d.psi0 = make_spinor(g, spec.psi);
  d.E0df = make_divfree_field(g, spec.E);
  d.B03 = make_scalar_field(g, spec.B);
  return d;
}

// ---------------------------------------------------------------------------
// Constraint, potential and field reconstruction

/// J^0 = |psi|^2, J^1 = 2 Re(psi1 conj psi2), J^2 = -2 Im(psi1 conj psi2); physical representation.
inline Current current(const Spinor& psi) {
  const Spinor p = as_physical(psi);
  const Grid2D& g = p[0].grid();
  Current J{ComplexField2D(g, Representation::physical), ComplexField2D(g, Representation::physical),
            ComplexField2D(g, Representation::physical)};
  for (std::size_t k = 0; k < p[0].size(); ++k) {
    const cplx a = p[0][k], b = p[1][k];
    const cplx ab = a * std::conj(b);
    J.J0[k] = std::norm(a) + std::norm(b);
    J.J1[k] = 2.0 * ab.real();
    J.J2[k] = -2.0 * ab.imag();
  }
  return J;
}

struct AssembledE0 {
  VecField E0;
  double removed_mean = 0.0;  // mean of |psi0|^2 subtracted to solve the torus Gauss law
};

/// E0 = E0df + Delta^{-1} grad(|psi0|^2 - mean).
inline AssembledE0 assemble_E0_report(const ChargeClassData& data) {
  ComplexField2D rho = current(data.psi0).J0;
  const double m = mean(rho).real();
  for (auto& v : rho.data()) v -= m;
  const ComplexField2D phi = inv_laplacian(rho, ZeroModePolicy::annihilate);
  const VecField grad = gradient(phi);
  VecField E = as_fourier(data.E0df);
  E[0] += grad[0];
  E[1] += grad[1];
  return {as_physical(E), m};
}

inline VecField assemble_E0(const ChargeClassData& data) { return assemble_E0_report(data).E0; }

/// a0 = a0dot = 0, a = -Delta^{-1}(d2 B, -d1 B), adot = -E0.  Fourier representation.
inline PotentialState potential_data(const ChargeClassData& data) {
  const Grid2D& g = data.grid();
  PotentialState p = PotentialState::zero(g);
  const ComplexField2D B = as_fourier(data.B03);
  for_each_mode(g, [&](std::size_t k, Vec2 xi) {
    if (k == 0) return;
    const double k2 = dot(xi, xi);
    p.A[1][k] = cplx(0.0, xi.y) * B[k] / k2;
    p.A[2][k] = cplx(0.0, -xi.x) * B[k] / k2;
  });
  const VecField E0 = as_fourier(assemble_E0(data));
  p.At[1] = -1.0 * E0[0];
  p.At[2] = -1.0 * E0[1];
  return p;
}

/// B^3 = d1 A2 - d2 A1, E = grad A0 - dt A, E^df = P_df E.
inline EMFields reconstruct_em(const PotentialState& pot) {
  EMFields f;
  f.B3 = partial(pot.A[2], 0) - partial(pot.A[1], 1);
  const VecField gA0 = gradient(pot.A[0]);
  f.E = {gA0[0] - as_fourier(pot.At[1]), gA0[1] - as_fourier(pot.At[2])};
  f.Edf = div_free_project(f.E);
  return f;
}

/// 2 E^df_pm = E^df pm i <D>^{-1}[curl(0,0,B) - P_df J]; 2 B_pm = B pm i |D|^{-1}[-(curl E^df)^3].
inline EMSplit split_em(const VecField& Edf, const ComplexField2D& B3, const Current& J) {
  const VecField curlB = curl_of_scalar(B3);
  const VecField PJ = div_free_project(VecField{J.J1, J.J2});
  const VecField E = as_fourier(Edf);
  const ComplexField2D B = as_fourier(B3);
  const ComplexField2D cE = curl3(E);
  EMSplit s;
  for (int c = 0; c < 2; ++c) {
    ComplexField2D K = curlB[c] - PJ[c];
    K = apply_multiplier(K, [](Vec2 xi) { return cplx(0.0, 1.0 / jbracket(norm(xi))); });
    s.Edf_plus[c] = 0.5 * (E[c] + K);
    s.Edf_minus[c] = 0.5 * (E[c] - K);
  }
  const ComplexField2D KB = apply_multiplier(
      -1.0 * cE, [](Vec2 xi) { return cplx(0.0, 1.0 / norm(xi)); }, ZeroModePolicy::annihilate);
  s.B3_plus = 0.5 * (B + KB);
  s.B3_minus = 0.5 * (B - KB);
  return s;
}

/// g^{pm}_j(xi) = |xi|^{1/2} (a^_j / 2 pm i adot^_j / (2|xi|)), j = 1, 2 (zero mode set to 0).
inline VecField g_symbol(const PotentialState& pot, int sign) {
  const ComplexField2D a1 = as_fourier(pot.A[1]), a2 = as_fourier(pot.A[2]);
  const ComplexField2D d1 = as_fourier(pot.At[1]), d2 = as_fourier(pot.At[2]);
  VecField g{ComplexField2D(a1.grid(), Representation::fourier), ComplexField2D(a1.grid(), Representation::fourier)};
  const double s = sign >= 0 ? 1.0 : -1.0;
  for_each_mode(a1.grid(), [&](std::size_t k, Vec2 xi) {
    if (k == 0) return;
    const double r = norm(xi);
    g[0][k] = std::sqrt(r) * (0.5 * a1[k] + s * cplx(0.0, 1.0) * d1[k] / (2.0 * r));
    g[1][k] = std::sqrt(r) * (0.5 * a2[k] + s * cplx(0.0, 1.0) * d2[k] / (2.0 * r));
  });
  return g;
}

// ---------------------------------------------------------------------------
// Low-frequency data conditions

struct BesovReport {
  double low_sum = 0.0;        // sum_{N < 1/T} ||P_N (E0df, B03)||
  double high_part = 0.0;      // ||P_{|xi| >= 1/T} (E0df, B03)||_{H^{-1/2}}
  double current_low = 0.0;    // sum_{N < 1/T} ||P_N J(0)||, spatial current
  double current_hm32 = 0.0;   // ||J(0)||_{H^{-3/2}}
  double psi_norm_sq = 0.0;
  double current_low_ratio = 0.0;
  double current_hm32_ratio = 0.0;
  double removed_mean = 0.0;
  bool finite = true;
};

inline BesovReport besov_data_check(const ChargeClassData& data, double T) {
  check_T(T, "besov_data_check");
  BesovReport r;
  const MagicParts em = magic_parts({&data.E0df[0], &data.E0df[1], &data.B03}, T);
  r.low_sum = em.low / std::sqrt(T);
  r.high_part = em.high;
  const Current J = current(data.psi0);
  const MagicParts jp = magic_parts({&J.J1, &J.J2}, T);
  r.current_low = jp.low / std::sqrt(T);
  r.current_hm32 = sobolev_norm(VecField{J.J1, J.J2}, -1.5);
  r.psi_norm_sq = norm_squared(data.psi0);
  if (r.psi_norm_sq > 0.0) {
    r.current_low_ratio = r.current_low / r.psi_norm_sq;
    r.current_hm32_ratio = r.current_hm32 / r.psi_norm_sq;
  }
  r.removed_mean = mean(J.J0).real();
  r.finite = std::isfinite(r.low_sum) && std::isfinite(r.high_part) && std::isfinite(r.current_low) &&
             std::isfinite(r.current_hm32);
  return r;
}

}  // namespace md2d
