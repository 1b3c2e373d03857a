#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "md2d/error.hpp"
#include "md2d/fft.hpp"
#include "md2d/grid.hpp"

namespace md2d {

using cplx = std::complex<double>;

enum class Representation : std::uint8_t { physical = 0, fourier = 1 };

/// @brief n x n complex samples on a Grid2D, tagged physical or Fourier.
///
/// Fourier coefficients approximate the continuum transform f^(xi) = int e^{-ix.xi} f dx,
/// i.e. f^ = dx^2 * DFT(f).  With this scaling
///   sum |f|^2 dx^2 = (2 pi)^{-2} sum |f^|^2 dk^2 = L^{-2} sum |f^|^2
/// holds exactly, matching Plancherel on R^2.
class ComplexField2D {
 public:
  ComplexField2D() = default;
  ComplexField2D(const Grid2D& g, Representation r) : grid_(g), data_(g.size()), rep_(r) {}
  ComplexField2D(const Grid2D& g, Representation r, std::vector<cplx> samples)
      : grid_(g), data_(std::move(samples)), rep_(r) {
    if (data_.size() != g.size()) throw UsageError("ComplexField2D: sample count does not match grid");
  }

  template <class F>
  static ComplexField2D from_function(const Grid2D& g, F&& f) {
    ComplexField2D out(g, Representation::physical);
    const int n = g.n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.data_[static_cast<std::size_t>(i) * n + j] = f(g.x(i, j));
    return out;
  }

  const Grid2D& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_fourier() const { return rep_ == Representation::fourier; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  cplx& operator[](std::size_t k) { return data_[k]; }
  const cplx& operator[](std::size_t k) const { return data_[k]; }
  cplx& at(int i, int j) { return data_[static_cast<std::size_t>(i) * grid_.n() + j]; }
  const cplx& at(int i, int j) const { return data_[static_cast<std::size_t>(i) * grid_.n() + j]; }

  ComplexField2D& operator+=(const ComplexField2D& o) {
    check_compatible(o, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexField2D& operator-=(const ComplexField2D& o) {
    check_compatible(o, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexField2D& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend ComplexField2D operator+(ComplexField2D a, const ComplexField2D& b) { return a += b; }
  friend ComplexField2D operator-(ComplexField2D a, const ComplexField2D& b) { return a -= b; }
  friend ComplexField2D operator*(cplx s, ComplexField2D a) { return a *= s; }
  friend ComplexField2D operator*(double s, ComplexField2D a) { return a *= cplx(s); }

  void set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0)); }

  // Representation flips in place; used by the free functions below.
  void transform_to_fourier() {
    if (rep_ != Representation::physical) throw UsageError("to_fourier: field is not in physical representation");
    fft::forward_2d(data_.data(), grid_.n());
    const double w = grid_.dx() * grid_.dx();
    for (auto& v : data_) v *= w;
    rep_ = Representation::fourier;
  }
  void transform_to_physical() {
    if (rep_ != Representation::fourier) throw UsageError("to_physical: field is not in Fourier representation");
    fft::backward_2d(data_.data(), grid_.n());
    const double L = grid_.box_period();
    const double w = 1.0 / (L * L);
    for (auto& v : data_) v *= w;
    rep_ = Representation::physical;
  }

 private:
  void check_compatible(const ComplexField2D& o, const char* where) const {
    require_same_grid(grid_, o.grid_, where);
    if (rep_ != o.rep_) throw UsageError(std::string(where) + ": representation mismatch");
  }

  Grid2D grid_;
  std::vector<cplx> data_;
  Representation rep_ = Representation::physical;
};

template <std::size_t K>
using FieldArray = std::array<ComplexField2D, K>;
using Spinor = FieldArray<2>;
using VecField = FieldArray<2>;

inline ComplexField2D to_fourier(ComplexField2D f) {
  f.transform_to_fourier();
  return f;
}
inline ComplexField2D to_physical(ComplexField2D f) {
  f.transform_to_physical();
  return f;
}
/// Converting variants that accept either representation.
inline ComplexField2D as_fourier(ComplexField2D f) {
  if (!f.is_fourier()) f.transform_to_fourier();
  return f;
}
inline ComplexField2D as_physical(ComplexField2D f) {
  if (f.is_fourier()) f.transform_to_physical();
  return f;
}
template <std::size_t K>
FieldArray<K> as_fourier(FieldArray<K> f) {
  for (auto& c : f)
    if (!c.is_fourier()) c.transform_to_fourier();
  return f;
}
template <std::size_t K>
FieldArray<K> as_physical(FieldArray<K> f) {
  for (auto& c : f)
    if (c.is_fourier()) c.transform_to_physical();
  return f;
}

inline double norm_squared(const ComplexField2D& f) {
  double s = 0.0;
  for (const auto& v : f.data()) s += std::norm(v);
  if (f.is_fourier()) {
    const double L = f.grid().box_period();
    return s / (L * L);
  }
  return s * f.grid().dx() * f.grid().dx();
}
inline double l2_norm(const ComplexField2D& f) { return std::sqrt(norm_squared(f)); }

template <std::size_t K>
double norm_squared(const FieldArray<K>& f) {
  double s = 0.0;
  for (const auto& c : f) s += norm_squared(c);
  return s;
}
template <std::size_t K>
double l2_norm(const FieldArray<K>& f) {
  return std::sqrt(norm_squared(f));
}

/// Spatial mean (1/L^2) int f dx.
inline cplx mean(const ComplexField2D& f) {
  if (f.is_fourier()) {
    const double L = f.grid().box_period();
    return f[0] / (L * L);
  }
  cplx s = 0.0;
  for (const auto& v : f.data()) s += v;
  return s / static_cast<double>(f.size());
}

inline double max_abs_imag(const ComplexField2D& f) {
  double m = 0.0;
  for (const auto& v : f.data()) m = std::max(m, std::abs(v.imag()));
  return m;
}

inline double max_abs(const ComplexField2D& f) {
  double m = 0.0;
  for (const auto& v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace md2d
