#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <vector>

#include "md2d/error.hpp"
#include "md2d/spectral.hpp"
#include "md2d/types.hpp"

namespace md2d {

// ---------------------------------------------------------------------------
// Sobolev and Besov-type norms

/// ||<D>^s f||.
inline double sobolev_norm(const ComplexField2D& f, double s) {
  const ComplexField2D ff = as_fourier(f);
  const double L = ff.grid().box_period();
  double acc = 0.0;
  for_each_mode(ff.grid(), [&](std::size_t k, Vec2 xi) { acc += std::pow(1.0 + dot(xi, xi), s) * std::norm(ff[k]); });
  return std::sqrt(acc) / L;
}

template <std::size_t K>
double sobolev_norm(const FieldArray<K>& f, double s) {
  double acc = 0.0;
  for (const auto& c : f) {
    const double v = sobolev_norm(c, s);
    acc += v * v;
  }
  return std::sqrt(acc);
}

/// Pieces of ||f||_(T) for a (possibly multi-component) field.
struct MagicParts {
  double high = 0.0;                  // ||P_{|xi| >= 1/T} f||_{H^{-1/2}}
  double low = 0.0;                   // T^{1/2} sum_{N < 1/T} ||P_{|xi|~N} f||
  std::map<int, double> shell_norms;  // ||P_{|xi|~N} f|| on the low part, keyed by log2 N
  double total() const { return high + low; }
};

inline void check_T(double T, const char* where) {
  if (!(T > 0.0 && T <= 1.0)) throw UsageError(std::string(where) + ": T must lie in (0, 1]");
}

/// Accumulates |coefficient|^2 by frequency magnitude; shared by the grid and sparse paths.
class MagicAccumulator {
 public:
  explicit MagicAccumulator(double T) : cut_(1.0 / T), T_(T) { check_T(T, "magic_norm"); }
  void add(double r, double a2) {
    if (r == 0.0) return;
    if (r >= cut_)
      high2_ += a2 / std::sqrt(1.0 + r * r);
    else
      low2_[dyadic_exponent(r)] += a2;
  }
  /// L: box period, converting coefficient sums to L^2 norms.
  MagicParts finish(double L) const {
    MagicParts out;
    if (L == 0.0) return out;
    out.high = std::sqrt(high2_) / L;
    double sum = 0.0;
    for (const auto& [j, v] : low2_) {
      const double nv = std::sqrt(v) / L;
      out.shell_norms[j] = nv;
      sum += nv;
    }
    out.low = std::sqrt(T_) * sum;
    return out;
  }

 private:
  double cut_, T_;
  double high2_ = 0.0;
  std::map<int, double> low2_;
};

/// Shells are [N, 2N) intersected with |xi| < 1/T; the zero mode is not counted.
inline MagicParts magic_parts(std::initializer_list<const ComplexField2D*> comps, double T) {
  MagicAccumulator acc(T);
  double L = 0.0;
  for (const ComplexField2D* c : comps) {
    const ComplexField2D ff = as_fourier(*c);
    L = ff.grid().box_period();
    for_each_mode(ff.grid(), [&](std::size_t k, Vec2 xi) {
      if (k != 0) acc.add(norm(xi), std::norm(ff[k]));
    });
  }
  return acc.finish(L);
}

struct SparseMode {
  Vec2 xi;
  cplx c;
};

/// ||f||_(T) for a field given by its nonzero Fourier coefficients on a box of period L.
inline MagicParts magic_parts(const std::vector<SparseMode>& modes, double L, double T) {
  MagicAccumulator acc(T);
  for (const auto& m : modes) acc.add(norm(m.xi), std::norm(m.c));
  return acc.finish(L);
}

inline double magic_norm(const ComplexField2D& f, double T) { return magic_parts({&f}, T).total(); }
inline double magic_norm(const VecField& v, double T) { return magic_parts({&v[0], &v[1]}, T).total(); }

struct ShellRow {
  double N = 0.0;
  double L = 0.0;
  double value = 0.0;
};

/// D_T and D~_T for one state.
struct NormReport {
  double magic_low = 0.0;
  double magic_high = 0.0;
  double D_T = 0.0;
  double tildeD_T = 0.0;
  std::vector<ShellRow> per_shell;  // low-frequency shell norms of (E^df, B^3), L column unused (0)
};

/// D_T = ||E^df||_(T) + ||B^3||_(T); D~_T sums the norms of the four split fields.
inline NormReport data_norm_DT(const EMSplit& s, double T) {
  NormReport r;
  const VecField Edf = {as_fourier(s.Edf_plus[0]) + as_fourier(s.Edf_minus[0]),
                        as_fourier(s.Edf_plus[1]) + as_fourier(s.Edf_minus[1])};
  const ComplexField2D B = as_fourier(s.B3_plus) + as_fourier(s.B3_minus);
  const MagicParts pe = magic_parts({&Edf[0], &Edf[1]}, T);
  const MagicParts pb = magic_parts({&B}, T);
  r.magic_low = pe.low + pb.low;
  r.magic_high = pe.high + pb.high;
  r.D_T = pe.total() + pb.total();
  r.tildeD_T = magic_norm(s.Edf_plus, T) + magic_norm(s.Edf_minus, T) + magic_norm(s.B3_plus, T) +
               magic_norm(s.B3_minus, T);
  const MagicParts joint = magic_parts({&Edf[0], &Edf[1], &B}, T);
  for (const auto& [j, v] : joint.shell_norms) r.per_shell.push_back({std::ldexp(1.0, j), 0.0, v});
  return r;
}

/// ||P_{xi != 0} |D|^{-a} <D>^{-b} (fg)|| / (||f|| ||g||); the product is formed pointwise.
inline double sobolev_product_ratio(const ComplexField2D& f, const ComplexField2D& g, double a, double b) {
  ComplexField2D fp = as_physical(f), gp = as_physical(g);
  const double denom = l2_norm(fp) * l2_norm(gp);
  if (denom == 0.0) return 0.0;
  ComplexField2D prod = fp;
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] *= gp[k];
  const ComplexField2D w = apply_multiplier(
      prod, [a, b](Vec2 xi) { return cplx(std::pow(norm(xi), -a) * std::pow(jbracket(norm(xi)), -b)); },
      ZeroModePolicy::annihilate);
  return l2_norm(w) / denom;
}

// ---------------------------------------------------------------------------
// Time cutoff

/// @brief rho = 1 on |t| <= 1, 0 on |t| >= 2: indicator of [-3/2, 3/2] mollified by the
/// bump exp(-1/(1-s^2)) rescaled to width 1/2.
class CutoffFunction {
 public:
  explicit CutoffFunction(double T = 1.0) : T_(T) {}
  double scale() const { return T_; }
  double operator()(double t) const { return profile(t / T_); }

  static double profile(double t) {
    const double x = (1.5 - std::abs(t)) / 0.5;  // in [-1, 1] on the transition
    if (x >= 1.0) return 1.0;
    if (x <= -1.0) return 0.0;
    const auto& tab = table();
    const double pos = (x + 1.0) / 2.0 * (tab.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), tab.size() - 2);
    const double w = pos - i;
    return (1.0 - w) * tab[i] + w * tab[i + 1];
  }

 private:
  // Cumulative integral of the normalized bump on [-1, 1], Simpson sub-steps.
  static const std::vector<double>& table() {
    static const std::vector<double> tab = [] {
      const int M = 20001;
      auto bump = [](double s) { return std::abs(s) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - s * s)); };
      std::vector<double> c(M, 0.0);
      const double h = 2.0 / (M - 1);
      for (int i = 1; i < M; ++i) {
        const double a = -1.0 + (i - 1) * h, b = a + h;
        c[i] = c[i - 1] + h / 6.0 * (bump(a) + 4.0 * bump(0.5 * (a + b)) + bump(b));
      }
      for (auto& v : c) v /= c.back();
      return c;
    }();
    return tab;
  }

  double T_;
};

// ---------------------------------------------------------------------------
// Space-time lattice and X^{s,b;p} norms

/// Uniform samples t_k = -T_win + k dt, k = 0..nt-1, dt = 2 T_win / nt; tau on (pi/T_win) Z.
struct SpaceTimeGrid {
  Grid2D grid;
  double T_win = 1.0;
  int nt = 64;

  SpaceTimeGrid() = default;
  SpaceTimeGrid(const Grid2D& g, double T_win_, int nt_) : grid(g), T_win(T_win_), nt(nt_) {
    if (!(T_win_ > 0.0)) throw UsageError("SpaceTimeGrid: time window must be positive");
    if (nt_ < 2 || nt_ % 2 != 0) throw UsageError("SpaceTimeGrid: time_points must be a positive even integer");
  }
  double dt() const { return 2.0 * T_win / nt; }
  double t(int k) const { return -T_win + k * dt(); }
  double dtau() const { return kPi / T_win; }
  double tau(int m) const { return dtau() * (m < nt / 2 ? m : m - nt); }
};

/// Space-time samples stored as one spatial field per time sample.
struct SpaceTimeField {
  SpaceTimeGrid st;
  std::vector<ComplexField2D> slices;

  SpaceTimeField() = default;
  explicit SpaceTimeField(const SpaceTimeGrid& g) : st(g) {
    slices.assign(g.nt, ComplexField2D(g.grid, Representation::physical));
  }
  template <class F>  // f(t, x) -> cplx
  static SpaceTimeField from_function(const SpaceTimeGrid& g, F&& f) {
    SpaceTimeField u(g);
    for (int k = 0; k < g.nt; ++k) {
      const double t = g.t(k);
      u.slices[k] = ComplexField2D::from_function(g.grid, [&](Vec2 x) { return f(t, x); });
    }
    return u;
  }
};

enum class Phase { wave_plus, wave_minus, kg_plus, kg_minus };

inline double phase_symbol(Phase p, Vec2 xi) {
  const double r = norm(xi);
  switch (p) {
    case Phase::wave_plus: return r;
    case Phase::wave_minus: return -r;
    case Phase::kg_plus: return jbracket(r);
    case Phase::kg_minus: return -jbracket(r);
  }
  return r;
}

enum class SumKind { l1, linf };

struct XsbResult {
  double value = 0.0;
  std::vector<ShellRow> shells;  // (N column unused = 0, L, ||<D>^s P_L u||)
};

/// Supplies, for spatial mode index k, the time series of spatial Fourier coefficients of
/// each component (nt samples each) into `series`.
using ModeSeriesFn = std::function<void(std::size_t mode, std::vector<std::vector<cplx>>& series)>;

/// Core of the X^{s,b;p} evaluation: time DFT per spatial mode, weight <tau + phi(xi)>,
/// dyadic modulation shells L >= 1 ([1,2) first), then l1 or sup of L^b ||<D>^s P_L u||.
inline XsbResult xsb_norm_modes(const SpaceTimeGrid& st, int ncomp, const ModeSeriesFn& fetch, double s, double b,
                                SumKind p, Phase phi) {
  const int nt = st.nt;
  const double L = st.grid.box_period();
  const double dt = st.dt();
  std::map<int, double> acc;
  std::vector<std::vector<cplx>> series(ncomp, std::vector<cplx>(nt));
  for_each_mode(st.grid, [&](std::size_t k, Vec2 xi) {
    fetch(k, series);
    const double ws = std::pow(1.0 + dot(xi, xi), s);
    const double ph = phase_symbol(phi, xi);
    for (int c = 0; c < ncomp; ++c) {
      auto& v = series[c];
      fft::forward_1d(v.data(), nt);
      for (int m = 0; m < nt; ++m) {
        const double a2 = std::norm(v[m]) * dt * dt;
        if (a2 == 0.0) continue;
        acc[dyadic_exponent(jbracket(st.tau(m) + ph))] += ws * a2;
      }
    }
  });
  XsbResult r;
  const double w = 1.0 / (2.0 * st.T_win * L * L);
  for (const auto& [j, v] : acc) {
    const double Lj = std::ldexp(1.0, j);
    const double shell = std::sqrt(v * w);
    r.shells.push_back({0.0, Lj, shell});
    const double term = std::pow(Lj, b) * shell;
    if (p == SumKind::l1)
      r.value += term;
    else
      r.value = std::max(r.value, term);
  }
  return r;
}

/// Spatial Fourier coefficients of every slice, laid out [slice][mode].
inline std::vector<std::vector<cplx>> slice_coefficients(const SpaceTimeField& u) {
  std::vector<std::vector<cplx>> out;
  out.reserve(u.slices.size());
  for (const auto& sl : u.slices) out.push_back(as_fourier(sl).data());
  return out;
}

template <std::size_t K>
XsbResult xsb_norm(const std::array<const SpaceTimeField*, K>& comps, double s, double b, SumKind p, Phase phi) {
  const SpaceTimeGrid& st = comps[0]->st;
  std::vector<std::vector<std::vector<cplx>>> coeffs;
  for (const auto* c : comps) coeffs.push_back(slice_coefficients(*c));
  auto fetch = [&](std::size_t mode, std::vector<std::vector<cplx>>& series) {
    for (std::size_t c = 0; c < K; ++c)
      for (int t = 0; t < st.nt; ++t) series[c][t] = coeffs[c][t][mode];
  };
  return xsb_norm_modes(st, static_cast<int>(K), fetch, s, b, p, phi);
}

inline XsbResult xsb_norm(const SpaceTimeField& u, double s, double b, SumKind p, Phase phi) {
  return xsb_norm(std::array<const SpaceTimeField*, 1>{&u}, s, b, p, phi);
}

/// sup_k ||u(t_k)||_{H^s}.
inline double linf_hs_norm(const SpaceTimeField& u, double s) {
  double m = 0.0;
  for (const auto& sl : u.slices) m = std::max(m, sobolev_norm(sl, s));
  return m;
}

/// ||u||_{L^2_{t,x}} over the window.
inline double spacetime_l2(const SpaceTimeField& u) {
  double acc = 0.0;
  for (const auto& sl : u.slices) acc += norm_squared(sl);
  return std::sqrt(acc * u.st.dt());
}

inline SpaceTimeField multiply_by_cutoff(const SpaceTimeField& u, const CutoffFunction& rho) {
  SpaceTimeField out = u;
  for (int k = 0; k < u.st.nt; ++k) out.slices[k] *= cplx(rho(u.st.t(k)));
  return out;
}

/// C_{b,b'} = sum_L L^{b-b'} over the dyadic L present in a result table.
inline double embedding_constant(const XsbResult& table, double b, double bprime) {
  double c = 0.0;
  for (const auto& row : table.shells) c += std::pow(row.L, b - bprime);
  return c;
}

struct CutoffReport {
  bool skipped = false;
  std::vector<std::pair<double, double>> cutoff1;  // (p, ||rho_T u|| / (T^{1/p} ||u||_{X^{0,1/p;1}}))
  std::vector<std::pair<double, double>> cutoff2;  // (b, ||rho_T u||_{X^{s,b;1}} / (T^{1/2-b} ||u||_{X^{s,1/2;1}}))
  double max_ratio = 0.0;
};

/// Cutoff estimates for p in {2, 4, inf} and b in {1/8, 1/4, 1/2}; s = 0.
inline CutoffReport cutoff_estimates_check(const SpaceTimeField& u, double T, Phase phi = Phase::wave_plus) {
  check_T(T, "cutoff_estimates_check");
  if (u.st.T_win < 2.0 * T) throw UsageError("cutoff_estimates_check: window must contain [-2T, 2T]");
  CutoffReport r;
  const SpaceTimeField cu = multiply_by_cutoff(u, CutoffFunction(T));
  const double lhs1 = spacetime_l2(cu);
  const double x12 = xsb_norm(u, 0.0, 0.5, SumKind::l1, phi).value;
  if (x12 == 0.0) {
    r.skipped = true;
    return r;
  }
  for (double p : {2.0, 4.0, std::numeric_limits<double>::infinity()}) {
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    const double rhs = std::pow(T, ip) * xsb_norm(u, 0.0, ip, SumKind::l1, phi).value;
    const double ratio = lhs1 / rhs;
    r.cutoff1.push_back({p, ratio});
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  for (double b : {0.125, 0.25, 0.5}) {
    const double lhs = xsb_norm(cu, 0.0, b, SumKind::l1, phi).value;
    const double ratio = lhs / (std::pow(T, 0.5 - b) * x12);
    r.cutoff2.push_back({b, ratio});
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

}  // namespace md2d
