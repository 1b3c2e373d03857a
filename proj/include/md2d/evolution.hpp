#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "md2d/dirac_fields.hpp"
#include "md2d/initial_data.hpp"
#include "md2d/norms.hpp"

namespace md2d {

// ---------------------------------------------------------------------------
// Free propagators

/// e^{-it phi(D)} f with phi from `gen` (wave: +-|xi|, kg: +-<xi>).  Fourier representation.
inline ComplexField2D free_propagate(const ComplexField2D& f, double t, Phase gen) {
  return apply_multiplier(f, [t, gen](Vec2 xi) { return std::polar(1.0, -t * phase_symbol(gen, xi)); });
}

template <std::size_t K>
FieldArray<K> free_propagate(const FieldArray<K>& f, double t, Phase gen) {
  FieldArray<K> out;
  for (std::size_t c = 0; c < K; ++c) out[c] = free_propagate(f[c], t, gen);
  return out;
}

inline Phase half_wave(int sign) { return sign >= 0 ? Phase::wave_plus : Phase::wave_minus; }

// ---------------------------------------------------------------------------
// State

struct DiracState {
  Spinor psi_plus, psi_minus;  // Fourier representation
  double time = 0.0;

  Spinor psi() const {
    Spinor s = as_fourier(psi_plus);
    const Spinor m = as_fourier(psi_minus);
    s[0] += m[0];
    s[1] += m[1];
    return s;
  }
  // The zero mode is shared half and half, so the charge is taken from the sum.
  double charge() const { return norm_squared(psi()); }
};

struct Diagnostics {
  double t = 0.0;
  double charge = 0.0;
  double gauss_residual = 0.0;   // ||div E - (J^0 - mean J^0)||, E from the potential, J^0 dealiased
  double lorenz_residual = 0.0;  // ||dt A_0 - div(A_1, A_2)||
  double projection_drift = 0.0; // max ||Pi_-+ psi_+-|| before re-projection
};

struct CoupledState {
  DiracState dirac;
  PotentialState pot;  // Fourier representation
  double M = 0.0;
  bool evolve_potential = true;  // false freezes (A, dt A) for linear Dirac runs
  Diagnostics diag;

  const Grid2D& grid() const { return dirac.psi_plus[0].grid(); }
  double time() const { return dirac.time; }
};

/// Carries the last state that was still finite.
class BlowUpError : public NumericsError {
 public:
  BlowUpError(const std::string& what, std::shared_ptr<const CoupledState> last_good)
      : NumericsError(what), last_good_(std::move(last_good)) {}
  const CoupledState* last_good() const { return last_good_.get(); }

 private:
  std::shared_ptr<const CoupledState> last_good_;
};

/// Lowered current used as the wave source: J_mu = (-(J^0 - mean J^0), J^1, J^2), dealiased, Fourier.
inline FieldArray<3> wave_source(const Current& J) {
  FieldArray<3> s;
  for (int mu = 0; mu < 3; ++mu) {
    ComplexField2D f = dealias(J[mu]);
    if (mu == 0) {
      f[0] = 0.0;
      f *= cplx(-1.0);
    }
    s[mu] = std::move(f);
  }
  return s;
}

inline double lorenz_residual(const PotentialState& pot) {
  return l2_norm(as_fourier(pot.At[0]) - divergence(VecField{pot.A[1], pot.A[2]}));
}

/// div E - (J^0 - mean) with E = grad A_0 - dt A and J^0 = |psi|^2 after dealiasing.
inline double gauss_residual(const PotentialState& pot, const Spinor& psi) {
  ComplexField2D rho = dealias(current(psi).J0);
  rho[0] = 0.0;
  const ComplexField2D divE = laplacian(pot.A[0]) - divergence(VecField{pot.At[1], pot.At[2]});
  return l2_norm(divE - rho);
}

inline void refresh_diagnostics(CoupledState& s) {
  const Spinor psi = s.dirac.psi();
  s.diag.t = s.dirac.time;
  s.diag.charge = s.dirac.charge();
  s.diag.gauss_residual = gauss_residual(s.pot, psi);
  s.diag.lorenz_residual = lorenz_residual(s.pot);
}

/// Charge-class data -> coupled state at t = 0 (psi split by Pi_+-, Lorenz potential data).
inline CoupledState make_state(const ChargeClassData& data, double M) {
  CoupledState s;
  s.dirac.psi_plus = apply_projection(data.psi0, +1);
  s.dirac.psi_minus = apply_projection(data.psi0, -1);
  s.pot = potential_data(data);
  s.M = M;
  refresh_diagnostics(s);
  return s;
}

// ---------------------------------------------------------------------------
// Right-hand sides

struct DiracTendency {
  Spinor plus, minus;
};

/// N_+- = -Pi_+-(M beta psi) + Pi_+-(A_mu alpha^mu psi), so that (-i dt +- |D|) psi_+- = N_+-.
inline DiracTendency dirac_rhs(const Spinor& psi_in, const FieldArray<3>& A_in, double M) {
  const Spinor psi = as_physical(psi_in);
  FieldArray<3> A = as_physical(A_in);
  Spinor n = psi;
  for (std::size_t k = 0; k < psi[0].size(); ++k) {
    const cplx u = psi[0][k], v = psi[1][k];
    const double a0 = A[0][k].real(), a1 = A[1][k].real(), a2 = A[2][k].real();
    // A_0 I + A_1 sigma^1 + A_2 sigma^2 - M sigma^3
    n[0][k] = (a0 - M) * u + cplx(a1, -a2) * v;
    n[1][k] = cplx(a1, a2) * u + (a0 + M) * v;
  }
  for (auto& c : n) c = dealias(c);
  return {apply_projection(n, +1), apply_projection(n, -1)};
}

inline DiracTendency dirac_rhs(const CoupledState& s) { return dirac_rhs(s.dirac.psi(), s.pot.A, s.M); }

/// Second-order tendencies dt^2 A_mu = Delta A_mu + J_mu, J_mu lowered, J^0 mean removed.
inline FieldArray<3> potential_rhs(const PotentialState& pot, const Spinor& psi) {
  const FieldArray<3> src = wave_source(current(psi));
  FieldArray<3> out;
  for (int mu = 0; mu < 3; ++mu) out[mu] = laplacian(pot.A[mu]) + src[mu];
  return out;
}

inline FieldArray<3> potential_rhs(const CoupledState& s) { return potential_rhs(s.pot, s.dirac.psi()); }

// ---------------------------------------------------------------------------
// Strang step

/// Exact free flow of (A, dt A) over time tau; zero mode drifts linearly.
inline void rotate_wave(PotentialState& pot, double tau) {
  for (int mu = 0; mu < 3; ++mu) {
    auto& a = pot.A[mu];
    auto& b = pot.At[mu];
    a = as_fourier(a);
    b = as_fourier(b);
    for_each_mode(a.grid(), [&](std::size_t k, Vec2 xi) {
      const double r = norm(xi);
      const cplx a0 = a[k], b0 = b[k];
      if (r == 0.0) {
        a[k] = a0 + tau * b0;
        return;
      }
      const double c = std::cos(r * tau), s = std::sin(r * tau);
      a[k] = c * a0 + (s / r) * b0;
      b[k] = -r * s * a0 + c * b0;
    });
  }
}

inline void kinetic(CoupledState& s, double tau) {
  s.dirac.psi_plus = free_propagate(s.dirac.psi_plus, tau, Phase::wave_plus);
  s.dirac.psi_minus = free_propagate(s.dirac.psi_minus, tau, Phase::wave_minus);
  if (s.evolve_potential) rotate_wave(s.pot, tau);
}

/// Pointwise psi <- exp(-i dt H) psi with H = M beta - A_0 - A_1 sigma^1 - A_2 sigma^2.
inline Spinor potential_kick(const Spinor& psi_in, const FieldArray<3>& A_in, double M, double dt) {
  Spinor psi = as_physical(psi_in);
  const FieldArray<3> A = as_physical(A_in);
  for (std::size_t k = 0; k < psi[0].size(); ++k) {
    const double a0 = A[0][k].real();
    const double v1 = -A[1][k].real(), v2 = -A[2][k].real(), v3 = M;
    const double vn = std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);
    const cplx u = psi[0][k], w = psi[1][k];
    const cplx ph = std::polar(1.0, dt * a0);
    if (vn == 0.0) {
      psi[0][k] = ph * u;
      psi[1][k] = ph * w;
      continue;
    }
    const double c = std::cos(dt * vn), sn = std::sin(dt * vn) / vn;
    const cplx mi(0.0, -1.0);
    // c I - i sn (v . sigma)
    const cplx m00 = c + mi * sn * v3, m11 = c - mi * sn * v3;
    const cplx m01 = mi * sn * cplx(v1, -v2), m10 = mi * sn * cplx(v1, v2);
    psi[0][k] = ph * (m00 * u + m01 * w);
    psi[1][k] = ph * (m10 * u + m11 * w);
  }
  return psi;
}

/// Kick: rotate psi pointwise, dealias, re-split, and advance dt A by the averaged current.
/// Returns the averaged lowered source (Fourier) that was applied.
inline FieldArray<3> kick(CoupledState& s, double dt) {
  const Spinor psi_old = as_physical(s.dirac.psi());
  Spinor psi_new = potential_kick(psi_old, s.pot.A, s.M, dt);
  for (auto& c : psi_new) c = dealias(c);
  s.dirac.psi_plus = apply_projection(psi_new, +1);
  s.dirac.psi_minus = apply_projection(psi_new, -1);
  const FieldArray<3> j_old = wave_source(current(psi_old));
  const FieldArray<3> j_new = wave_source(current(psi_new));
  FieldArray<3> avg;
  for (int mu = 0; mu < 3; ++mu) {
    avg[mu] = 0.5 * (j_old[mu] + j_new[mu]);
    if (s.evolve_potential) s.pot.At[mu] = as_fourier(s.pot.At[mu]) + dt * avg[mu];
  }
  return avg;
}

inline bool all_finite(const CoupledState& s) {
  auto ok = [](const ComplexField2D& f) {
    for (const cplx& v : f.data())
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  };
  for (const auto& c : s.dirac.psi_plus)
    if (!ok(c)) return false;
  for (const auto& c : s.dirac.psi_minus)
    if (!ok(c)) return false;
  for (int mu = 0; mu < 3; ++mu)
    if (!ok(s.pot.A[mu]) || !ok(s.pot.At[mu])) return false;
  return true;
}

/// ||Pi_- psi_+|| + ||Pi_+ psi_-|| over nonzero modes.
inline double projection_drift(const DiracState& d) {
  Spinor a = apply_projection(d.psi_plus, -1), b = apply_projection(d.psi_minus, +1);
  for (int c = 0; c < 2; ++c) a[c][0] = b[c][0] = 0.0;
  return l2_norm(a) + l2_norm(b);
}

/// Strang step: half kinetic, kick, half kinetic.  Throws BlowUpError on non-finite output.
inline CoupledState step(const CoupledState& in, double dt, bool diagnostics = true) {
  if (!(dt > 0.0)) throw UsageError("step: dt must be positive");
  CoupledState s = in;
  kinetic(s, 0.5 * dt);
  kick(s, dt);
  kinetic(s, 0.5 * dt);
  s.dirac.time = in.dirac.time + dt;
  if (!all_finite(s))
    throw BlowUpError("non-finite state at t = " + std::to_string(s.dirac.time),
                      std::make_shared<const CoupledState>(in));
  if (diagnostics) {
    refresh_diagnostics(s);
    s.diag.projection_drift = projection_drift(s.dirac);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Interval solve

/// Evolved electromagnetic split fields and their D_T report at the current time.
inline EMSplit em_split_of(const CoupledState& s) {
  const EMFields f = reconstruct_em(s.pot);
  return split_em(f.Edf, f.B3, current(s.dirac.psi()));
}

struct Snapshot {
  Diagnostics diag;
  double D_T = 0.0;
  double tildeD_T = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> rows;
  std::vector<CoupledState> states;  // only when keep_states
  CoupledState final_state;
  double norm_T = 1.0;  // T used in D_T / tildeD_T

  double charge_drift() const {
    if (rows.empty() || rows.front().diag.charge == 0.0) return 0.0;
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::abs(r.diag.charge - rows.front().diag.charge));
    return m / rows.front().diag.charge;
  }
  double max_gauss() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.diag.gauss_residual);
    return m;
  }
  double max_lorenz() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.diag.lorenz_residual);
    return m;
  }
};

struct IntervalOptions {
  int record_every = 1;
  double norm_T = 1.0;  // T for the D_T columns
  bool keep_states = false;
  bool norms = true;
};

inline Snapshot snapshot_of(const CoupledState& s, const IntervalOptions& o) {
  Snapshot r{s.diag, 0.0, 0.0};
  if (o.norms) {
    const NormReport nr = data_norm_DT(em_split_of(s), o.norm_T);
    r.D_T = nr.D_T;
    r.tildeD_T = nr.tildeD_T;
  }
  return r;
}

/// Evolve over [t0, t0 + T] with a fixed number of steps round(T / dt).
inline Trajectory solve_interval(const CoupledState& init, double T, double dt, const IntervalOptions& o = {}) {
  if (!(T > 0.0)) throw UsageError("solve_interval: T must be positive");
  if (!(dt > 0.0)) throw UsageError("solve_interval: dt must be positive");
  if (o.record_every < 1) throw UsageError("solve_interval: record_every must be >= 1");
  const long nsteps = std::max(1L, std::lround(T / dt));
  const double h = T / static_cast<double>(nsteps);
  Trajectory tr;
  tr.norm_T = o.norm_T;
  CoupledState s = init;
  tr.rows.push_back(snapshot_of(s, o));
  if (o.keep_states) tr.states.push_back(s);
  for (long k = 1; k <= nsteps; ++k) {
    s = step(s, h);
    s.dirac.time = init.dirac.time + k * h;
    if (k % o.record_every == 0 || k == nsteps) {
      tr.rows.push_back(snapshot_of(s, o));
      if (o.keep_states) tr.states.push_back(s);
    }
  }
  tr.final_state = std::move(s);
  return tr;
}

// ---------------------------------------------------------------------------
// Duhamel representation of the inverse d'Alembertian

struct DuhamelPair {
  ComplexField2D plus, minus;  // Fourier representation; zero mode set to 0
};

/// u_+(t) = -(e^{-ikt}/4 pi k) int (e^{it(tau+k)} - 1)/(tau+k) G~ dtau,
/// u_-(t) = +(e^{ikt}/4 pi k) int (e^{it(tau-k)} - 1)/(tau-k) G~ dtau, k = |xi|.
/// u_+ + u_- solves box u = G with u(0) = dt u(0) = 0.  G~ is the time DFT of the window
/// samples, so G is treated as periodic on the window.
inline DuhamelPair duhamel_box_inverse(const SpaceTimeField& G, double t) {
  const SpaceTimeGrid& st = G.st;
  const Grid2D& g = st.grid;
  const int nt = st.nt;
  const auto coeffs = slice_coefficients(G);
  DuhamelPair out{ComplexField2D(g, Representation::fourier), ComplexField2D(g, Representation::fourier)};
  std::vector<cplx> series(nt);
  const double dtau = st.dtau(), dt = st.dt();
  auto kernel = [t](double a) {
    if (std::abs(a * t) < 1e-8) return cplx(0.0, t) * (1.0 + cplx(0.0, 0.5 * a * t));
    return (std::polar(1.0, a * t) - 1.0) / a;
  };
  for_each_mode(g, [&](std::size_t k, Vec2 xi) {
    const double r = norm(xi);
    if (r == 0.0) return;
    for (int l = 0; l < nt; ++l) series[l] = coeffs[l][k];
    fft::forward_1d(series.data(), nt);
    cplx ip(0.0), im(0.0);
    for (int m = 0; m < nt; ++m) {
      const double tau = st.tau(m);
      const cplx Gt = dt * series[m] * std::polar(1.0, tau * st.T_win);
      ip += kernel(tau + r) * Gt;
      im += kernel(tau - r) * Gt;
    }
    out.plus[k] = -std::polar(1.0, -r * t) / (4.0 * kPi * r) * dtau * ip;
    out.minus[k] = std::polar(1.0, r * t) / (4.0 * kPi * r) * dtau * im;
  });
  return out;
}

/// Leapfrog for box u = G, i.e. u'' = Delta u - G, mode by mode from (u0, u1) at t = 0.
/// `G(t)` returns the source in any representation.
inline ComplexField2D leapfrog_wave(const ComplexField2D& u0, const ComplexField2D& u1,
                                   const std::function<ComplexField2D(double)>& G, double t_end, double dt) {
  const long nsteps = std::max(1L, std::lround(t_end / dt));
  const double h = t_end / static_cast<double>(nsteps);
  const Grid2D& g = u0.grid();
  std::vector<double> k2(g.size());
  for_each_mode(g, [&](std::size_t k, Vec2 xi) { k2[k] = dot(xi, xi); });
  ComplexField2D prev = as_fourier(u0);
  ComplexField2D cur = prev;
  {
    const ComplexField2D v = as_fourier(u1), G0 = as_fourier(G(0.0));
    for (std::size_t k = 0; k < g.size(); ++k) cur[k] = prev[k] + h * v[k] + 0.5 * h * h * (-k2[k] * prev[k] - G0[k]);
  }
  for (long n = 1; n < nsteps; ++n) {
    const ComplexField2D Gn = as_fourier(G(n * h));
    for (std::size_t k = 0; k < g.size(); ++k) {
      const cplx next = 2.0 * cur[k] - prev[k] + h * h * (-k2[k] * cur[k] - Gn[k]);
      prev[k] = cur[k];
      cur[k] = next;
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Picard iteration

struct PicardOptions {
  double dt = 0.0;        // 0: T / 32
  int n_max = 8;
  double tol = 1e-13;     // relative to p_0
  int nt_per_T = 0;       // time samples per T on the norm window; 0: steps per T
};

struct PicardReport {
  std::vector<double> p, q;  // p_n, q_n for n = 0..
  bool converged = false;
  int n_star = -1;
  bool non_contraction = false;
  Spinor final_psi;  // psi^{(n_star)}(T), Fourier
  double T = 0.0;
  double dt = 0.0;
};

namespace detail {

/// Samples psi_+-(t_k) of one iterate on the step lattice, Fourier representation.
struct IterateTrace {
  std::vector<Spinor> plus, minus;
};

/// X^{0,1/2;1}_+- norm of the extension of a sampled [0,T] trace (free flow outside,
/// times rho(t / 2T)), on the window [-4T, 4T].
inline double trace_xsb(const IterateTrace& a, const IterateTrace* b, double T, int sign) {
  const auto& A = sign > 0 ? a.plus : a.minus;
  const std::vector<Spinor>* B = b ? (sign > 0 ? &b->plus : &b->minus) : nullptr;
  const int K = static_cast<int>(A.size()) - 1;
  const Grid2D& g = A[0][0].grid();
  const SpaceTimeGrid st(g, 4.0 * T, 8 * K);
  const CutoffFunction rho(2.0 * T);
  const Phase ph = half_wave(sign);
  auto fetch = [&](std::size_t mode, std::vector<std::vector<cplx>>& series) {
    const double r = phase_symbol(ph, st.grid.xi(static_cast<int>(mode / g.n()), static_cast<int>(mode % g.n())));
    for (int c = 0; c < 2; ++c) {
      auto val = [&](int k) {
        cplx v = A[k][c][mode];
        if (B) v -= (*B)[k][c][mode];
        return v;
      };
      for (int l = 0; l < st.nt; ++l) {
        const int k = l - 4 * K;
        const double t = st.t(l);
        cplx v;
        if (k < 0)
          v = std::polar(1.0, -t * r) * val(0);
        else if (k > K)
          v = std::polar(1.0, -(t - T) * r) * val(K);
        else
          v = val(k);
        series[c][l] = rho(t) * v;
      }
    }
  };
  return xsb_norm_modes(st, 2, fetch, 0.0, 0.5, SumKind::l1, ph).value;
}

}  // namespace detail

/// Picard iterates for the split Dirac equation with the potential solved from the previous
/// iterate's current.  Each iterate is an exponential trapezoid discretization of
/// psi_+-(t) = e^{-+it|D|} Pi_+- psi_0 + i int_0^t e^{-+i(t-s)|D|} N_+-(s) ds
/// with N evaluated on the previous iterate; psi^{(-1)} = 0.
inline PicardReport picard_iterate(const ChargeClassData& data, double M, double T, const PicardOptions& opt = {}) {
  if (!(T > 0.0)) throw UsageError("picard_iterate: T must be positive");
  if (opt.n_max < 1) throw UsageError("picard_iterate: n_max must be >= 1");
  const int K = opt.dt > 0.0 ? std::max(1, static_cast<int>(std::lround(T / opt.dt))) : 32;
  const PotentialState pot0 = potential_data(data);
  const Spinor p0 = apply_projection(data.psi0, +1), m0 = apply_projection(data.psi0, -1);
  const Grid2D& g = data.grid();

  const double h = T / K;
  PicardReport rep;
  rep.T = T;
  rep.dt = h;

  detail::IterateTrace prev;  // psi^{(-1)} = 0
  {
    Spinor z;
    for (auto& c : z) c = ComplexField2D(g, Representation::fourier);
    prev.plus.assign(K + 1, z);
    prev.minus.assign(K + 1, z);
  }
  int increases = 0;
  const cplx I(0.0, 1.0);

  for (int n = 0; n <= opt.n_max; ++n) {
    detail::IterateTrace cur;
    cur.plus.resize(K + 1);
    cur.minus.resize(K + 1);
    cur.plus[0] = p0;
    cur.minus[0] = m0;
    PotentialState pot = pot0;
    auto prev_psi = [&](int k) {
      Spinor psi = prev.plus[k];
      psi[0] += prev.minus[k][0];
      psi[1] += prev.minus[k][1];
      return psi;
    };
    FieldArray<3> J_k = wave_source(current(prev_psi(0)));
    DiracTendency N_k = dirac_rhs(prev_psi(0), pot.A, M);
    for (int k = 0; k < K; ++k) {
      const DiracTendency N_old = std::move(N_k);
      const FieldArray<3> J_old = std::move(J_k);
      const Spinor psi_next = prev_psi(k + 1);
      J_k = wave_source(current(psi_next));
      // Potential: exponential trapezoid for (A, dt A)' = L (A, dt A) + (0, J).
      PotentialState src_old = PotentialState::zero(g);
      for (int mu = 0; mu < 3; ++mu) src_old.At[mu] = 0.5 * h * J_old[mu];
      rotate_wave(pot, h);
      rotate_wave(src_old, h);
      for (int mu = 0; mu < 3; ++mu) {
        pot.A[mu] += src_old.A[mu];
        pot.At[mu] += src_old.At[mu] + 0.5 * h * J_k[mu];
      }
      N_k = dirac_rhs(psi_next, pot.A, M);
      for (int sgn : {+1, -1}) {
        const Phase ph = half_wave(sgn);
        const Spinor& last = sgn > 0 ? cur.plus[k] : cur.minus[k];
        const Spinor& No = sgn > 0 ? N_old.plus : N_old.minus;
        const Spinor& Nn = sgn > 0 ? N_k.plus : N_k.minus;
        Spinor next = free_propagate(last, h, ph);
        const Spinor prop_old = free_propagate(No, h, ph);
        for (int c = 0; c < 2; ++c) next[c] += (0.5 * h) * I * (prop_old[c] + Nn[c]);
        (sgn > 0 ? cur.plus[k + 1] : cur.minus[k + 1]) = std::move(next);
      }
    }
    const double pn = detail::trace_xsb(cur, nullptr, T, +1) + detail::trace_xsb(cur, nullptr, T, -1);
    const double qn = detail::trace_xsb(cur, &prev, T, +1) + detail::trace_xsb(cur, &prev, T, -1);
    rep.p.push_back(pn);
    rep.q.push_back(qn);
    if (n >= 1 && qn > rep.q[n - 1]) {
      if (++increases >= 3) rep.non_contraction = true;
    } else {
      increases = 0;
    }
    prev = std::move(cur);
    if (n >= 1 && qn <= opt.tol * std::max(rep.p.front(), 1e-300)) {
      rep.converged = true;
      rep.n_star = n;
      break;
    }
    if (rep.p.front() == 0.0 && n >= 1) {
      rep.converged = true;
      rep.n_star = n;
      break;
    }
  }
  if (rep.n_star < 0) rep.n_star = static_cast<int>(rep.p.size()) - 1;
  rep.final_psi = prev.plus[K];
  rep.final_psi[0] += prev.minus[K][0];
  rep.final_psi[1] += prev.minus[K][1];
  return rep;
}

}  // namespace md2d
