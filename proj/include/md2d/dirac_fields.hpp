#pragma once

#include "md2d/dirac.hpp"
#include "md2d/spectral.hpp"

namespace md2d {

/// Pi(sign D) psi, mode by mode; the zero mode gets I/2.  Result is in Fourier representation.
inline Spinor apply_projection(const Spinor& psi, int sign) {
  Spinor out = as_fourier(psi);
  require_same_grid(out[0].grid(), out[1].grid(), "apply_projection");
  auto& a = out[0].data();
  auto& b = out[1].data();
  const double s = sign >= 0 ? 1.0 : -1.0;
  for_each_mode(out[0].grid(), [&](std::size_t k, Vec2 xi) {
    const double r = norm(xi);
    const cplx u = a[k], v = b[k];
    if (r == 0.0) {
      a[k] = 0.5 * u;
      b[k] = 0.5 * v;
      return;
    }
    const double c1 = s * xi.x / r, c2 = s * xi.y / r;
    a[k] = 0.5 * (u + cplx(c1, -c2) * v);
    b[k] = 0.5 * (cplx(c1, c2) * u + v);
  });
  return out;
}

/// Pointwise 2x2 matrix times spinor field, in physical space.
inline Spinor apply_pointwise(const Mat2& m, const Spinor& psi) {
  Spinor p = as_physical(psi);
  Spinor out = p;
  for (std::size_t k = 0; k < p[0].size(); ++k) {
    const cplx u = p[0][k], v = p[1][k];
    out[0][k] = m(0, 0) * u + m(0, 1) * v;
    out[1][k] = m(1, 0) * u + m(1, 1) * v;
  }
  return out;
}

}  // namespace md2d
