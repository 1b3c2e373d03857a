#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "md2d/error.hpp"
#include "md2d/geometry.hpp"

namespace md2d {

/// @brief Periodic n x n lattice on [0, L)^2 and its dual frequency lattice (2pi/L) Z^2.
///
/// Sample (i, j) sits at x = (i dx, j dx) and is stored at i * n + j.  Fourier index i
/// carries the integer wavenumber m = i for i < n/2 and m = i - n otherwise, so the
/// Nyquist wavenumber -n/2 has no partner and is always removed by the dealias mask.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(double box_period, int n, double dealias_fraction = 2.0 / 3.0)
      : box_period_(box_period), n_(n), dealias_(dealias_fraction) {
    if (!(box_period > 0.0) || !std::isfinite(box_period))
      throw UsageError("Grid2D: box_period must be positive and finite");
    if (n < 2 || n % 2 != 0) throw UsageError("Grid2D: points_per_axis must be a positive even integer");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
      throw UsageError("Grid2D: dealias_fraction must lie in (0, 1]");
  }

  double box_period() const { return box_period_; }
  int n() const { return n_; }
  double dealias_fraction() const { return dealias_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  double dx() const { return box_period_ / n_; }
  double dk() const { return 2.0 * kPi / box_period_; }

  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }
  double frequency(int i) const { return dk() * wavenumber(i); }
  Vec2 xi(int i, int j) const { return {frequency(i), frequency(j)}; }
  Vec2 x(int i, int j) const { return {i * dx(), j * dx()}; }

  /// Largest retained |m| per axis under the dealias rule (2/3 rule: n/3).
  int dealias_cutoff() const {
    return static_cast<int>(std::floor(dealias_ * (n_ / 2) + 1e-9));
  }
  bool is_nyquist(int i) const { return i == n_ / 2; }
  bool keeps(int i, int j) const {
    if (is_nyquist(i) || is_nyquist(j)) return false;
    const int c = dealias_cutoff();
    return std::abs(wavenumber(i)) <= c && std::abs(wavenumber(j)) <= c;
  }

  bool operator==(const Grid2D& o) const {
    return n_ == o.n_ && box_period_ == o.box_period_ && dealias_ == o.dealias_;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }

 private:
  double box_period_ = 2.0 * kPi;
  int n_ = 16;
  double dealias_ = 2.0 / 3.0;
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where) {
  if (a != b) throw UsageError(std::string(where) + ": fields live on different grids");
}

}  // namespace md2d
