#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "md2d/field.hpp"
#include "md2d/geometry.hpp"

namespace md2d {

enum class ZeroModePolicy { error, annihilate };

/// Visit every Fourier lattice point: fn(k, xi) with k the flat index.
template <class Fn>
void for_each_mode(const Grid2D& g, Fn&& fn) {
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    const double k1 = g.frequency(i);
    for (int j = 0; j < n; ++j) fn(static_cast<std::size_t>(i) * n + j, Vec2{k1, g.frequency(j)});
  }
}

/// @brief h(D): coefficientwise multiplication by h(xi).
///
/// A non-finite symbol value at a mode carrying a nonzero coefficient is a PolicyError
/// under ZeroModePolicy::error; ZeroModePolicy::annihilate zeroes such modes instead.
template <class H>
ComplexField2D apply_multiplier(const ComplexField2D& f, H&& h, ZeroModePolicy policy = ZeroModePolicy::error) {
  ComplexField2D out = as_fourier(f);
  auto& d = out.data();
  for_each_mode(out.grid(), [&](std::size_t k, Vec2 xi) {
    const cplx v = h(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      if (d[k] != cplx(0.0) && policy == ZeroModePolicy::error)
        throw PolicyError("apply_multiplier: symbol is singular on the support");
      d[k] = 0.0;
    } else {
      d[k] *= v;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Dyadic shells

enum class ShellMode { homogeneous, inhomogeneous };

/// Dyadic number N = 2^j; shells are the half-open ranges [N, 2N).
struct DyadicShell {
  int j = 0;
  double N() const { return std::ldexp(1.0, j); }
  bool operator<(const DyadicShell& o) const { return j < o.j; }
  bool operator==(const DyadicShell& o) const { return j == o.j; }
};

/// Exponent j with 2^j <= r < 2^{j+1}; exact at powers of two.
inline int dyadic_exponent(double r) {
  int e = 0;
  std::frexp(r, &e);
  return e - 1;
}

/// Shell containing a frequency: |xi| ~ N (homogeneous, xi != 0) or <xi> ~ N (inhomogeneous).
inline int shell_of(Vec2 xi, ShellMode mode) {
  if (mode == ShellMode::homogeneous) return dyadic_exponent(norm(xi));
  return dyadic_exponent(jbracket(norm(xi)));
}

/// All shells met by the lattice, ascending.
inline std::vector<DyadicShell> lattice_shells(const Grid2D& g, ShellMode mode) {
  std::map<int, int> seen;
  for_each_mode(g, [&](std::size_t k, Vec2 xi) {
    if (mode == ShellMode::homogeneous && k == 0) return;
    seen[shell_of(xi, mode)] = 1;
  });
  std::vector<DyadicShell> out;
  for (const auto& kv : seen) out.push_back({kv.first});
  return out;
}

inline void check_shell_range(const Grid2D& g, DyadicShell s, ShellMode mode) {
  const double kmax = std::sqrt(2.0) * g.dk() * (g.n() / 2);
  const double lo = mode == ShellMode::homogeneous ? g.dk() : 1.0;
  const double top = mode == ShellMode::homogeneous ? kmax : jbracket(kmax);
  if (s.j < dyadic_exponent(lo) || s.j > dyadic_exponent(top))
    throw UsageError("lp_project: shell N = " + std::to_string(s.N()) + " outside the lattice range");
  if (mode == ShellMode::inhomogeneous && s.j < 0) throw UsageError("lp_project: inhomogeneous shells need N >= 1");
}

/// Sharp projection onto {|xi| in [N,2N)} or {<xi> in [N,2N)}.
inline ComplexField2D lp_project(const ComplexField2D& f, DyadicShell s, ShellMode mode) {
  check_shell_range(f.grid(), s, mode);
  ComplexField2D out = as_fourier(f);
  auto& d = out.data();
  for_each_mode(out.grid(), [&](std::size_t k, Vec2 xi) {
    const bool zero = k == 0;
    const bool in = (mode == ShellMode::homogeneous) ? (!zero && shell_of(xi, mode) == s.j) : shell_of(xi, mode) == s.j;
    if (!in) d[k] = 0.0;
  });
  return out;
}

/// Squared L2 norm per homogeneous shell (zero mode excluded), ascending in N.
inline std::map<int, double> shell_energies(const ComplexField2D& f) {
  const ComplexField2D ff = as_fourier(f);
  const double L = ff.grid().box_period();
  std::map<int, double> acc;
  for_each_mode(ff.grid(), [&](std::size_t k, Vec2 xi) {
    if (k == 0) return;
    acc[shell_of(xi, ShellMode::homogeneous)] += std::norm(ff[k]);
  });
  for (auto& kv : acc) kv.second /= L * L;
  return acc;
}

// ---------------------------------------------------------------------------
// Sectors

struct Sector {
  double gamma = kPi;
  Vec2 omega{1.0, 0.0};
};

/// Omega(gamma): K = ceil(2 pi / gamma) equally spaced unit vectors, spacing 2 pi / K <= gamma.
inline std::vector<Vec2> omega_family(double gamma) {
  if (!(gamma > 0.0 && gamma <= kPi)) throw UsageError("omega_family: gamma must lie in (0, pi]");
  const int K = static_cast<int>(std::ceil(2.0 * kPi / gamma - 1e-12));
  const double step = 2.0 * kPi / K;
  std::vector<Vec2> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) out.push_back(unit_vector(k * step));
  return out;
}

inline bool in_sector(Vec2 xi, const Sector& s, int sign) {
  if (xi.x == 0.0 && xi.y == 0.0) return false;
  return angle(sign * xi, s.omega) <= s.gamma;
}

/// Projection onto {sign * xi in Gamma_gamma(omega)}; the zero mode is never in a sector.
inline ComplexField2D sector_project(const ComplexField2D& f, const Sector& s, int sign) {
  if (!(s.gamma > 0.0 && s.gamma <= kPi)) throw UsageError("sector_project: gamma must lie in (0, pi]");
  ComplexField2D out = as_fourier(f);
  auto& d = out.data();
  for_each_mode(out.grid(), [&](std::size_t k, Vec2 xi) {
    if (!in_sector(xi, s, sign)) d[k] = 0.0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Derivatives, projections, elliptic solves

/// Spectral partial derivative d/dx^axis (axis 0 or 1).
inline ComplexField2D partial(const ComplexField2D& f, int axis) {
  return apply_multiplier(f, [axis](Vec2 xi) { return cplx(0.0, xi[axis]); });
}

inline ComplexField2D laplacian(const ComplexField2D& f) {
  return apply_multiplier(f, [](Vec2 xi) { return cplx(-dot(xi, xi)); });
}

inline ComplexField2D divergence(const VecField& v) {
  return partial(v[0], 0) + partial(v[1], 1);
}

inline VecField gradient(const ComplexField2D& f) { return {partial(f, 0), partial(f, 1)}; }

/// Third component of curl of an in-plane field: d1 v2 - d2 v1.
inline ComplexField2D curl3(const VecField& v) { return partial(v[1], 0) - partial(v[0], 1); }

/// In-plane part of curl(0,0,b) = (d2 b, -d1 b).
inline VecField curl_of_scalar(const ComplexField2D& b) {
  return {partial(b, 1), -1.0 * partial(b, 0)};
}

/// Divergence-free (Leray) projection v -> v - xi (xi.v)/|xi|^2; zero mode passes through.
inline VecField div_free_project(const VecField& v) {
  VecField out = as_fourier(v);
  require_same_grid(out[0].grid(), out[1].grid(), "div_free_project");
  auto& a = out[0].data();
  auto& b = out[1].data();
  for_each_mode(out[0].grid(), [&](std::size_t k, Vec2 xi) {
    if (k == 0) return;
    const double k2 = dot(xi, xi);
    const cplx p = (xi.x * a[k] + xi.y * b[k]) / k2;
    a[k] -= xi.x * p;
    b[k] -= xi.y * p;
  });
  return out;
}

/// Delta^{-1}: multiplier -1/|xi|^2 off the zero mode.
inline ComplexField2D inv_laplacian(const ComplexField2D& f, ZeroModePolicy policy) {
  ComplexField2D out = as_fourier(f);
  if (policy == ZeroModePolicy::error) {
    const double scale = l2_norm(out);
    const double L = out.grid().box_period();
    if (std::abs(out[0]) / L > 1e-12 * scale && std::abs(out[0]) > 0.0)
      throw ConstraintViolation("inv_laplacian: input has nonzero mean");
  }
  auto& d = out.data();
  d[0] = 0.0;
  for_each_mode(out.grid(), [&](std::size_t k, Vec2 xi) {
    if (k != 0) d[k] *= -1.0 / dot(xi, xi);
  });
  return out;
}

/// 2/3-rule mask (and Nyquist removal) in Fourier space.
inline ComplexField2D dealias(const ComplexField2D& f) {
  ComplexField2D out = as_fourier(f);
  const Grid2D& g = out.grid();
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!g.keeps(i, j)) out.at(i, j) = 0.0;
  return out;
}

inline void dealias_inplace_fourier(std::vector<cplx>& d, const Grid2D& g) {
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!g.keeps(i, j)) d[static_cast<std::size_t>(i) * n + j] = 0.0;
}

/// Pointwise real part, kept in the representation of the input after the round trip.
inline ComplexField2D real_part(const ComplexField2D& f) {
  ComplexField2D p = as_physical(f);
  for (auto& v : p.data()) v = cplx(v.real(), 0.0);
  return p;
}

}  // namespace md2d
