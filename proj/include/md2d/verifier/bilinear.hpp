#pragma once

#include <string>
#include <vector>

#include "md2d/geometry.hpp"
#include "md2d/norms.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

/// Continuum support of a flat packet: <xi> in [N, 2N), <tau + sign |xi|> in [L, 2L),
/// optionally sign xi in Gamma_gamma(omega) and |xi x omega| <= tube.
struct PacketSupport {
  double N = 1.0, L = 1.0;
  int sign = 1;
  double gamma = kPi;
  Vec2 omega{1.0, 0.0};
  double tube = 0.0;  // 0 = no tube restriction

  double rho_lo() const { return std::sqrt(std::max(N * N - 1.0, 0.0)); }
  double rho_hi() const { return std::sqrt(4.0 * N * N - 1.0); }
  double h_lo() const { return std::sqrt(std::max(L * L - 1.0, 0.0)); }
  double h_hi() const { return std::sqrt(4.0 * L * L - 1.0); }

  bool contains(double tau, Vec2 xi) const {
    const double r = norm(xi);
    const double br = jbracket(r);
    if (br < N || br >= 2.0 * N) return false;
    const double bh = jbracket(tau + sign * r);
    if (bh < L || bh >= 2.0 * L) return false;
    if (gamma < kPi && (r == 0.0 || angle(sign * xi, omega) > gamma)) return false;
    if (tube > 0.0 && std::abs(cross(omega, xi)) > tube) return false;
    return true;
  }

  /// Area of {|y| <= a} inside the disk of radius R, y the coordinate across omega.
  static double strip_disk_area(double R, double a) {
    if (R <= 0.0) return 0.0;
    a = std::min(a, R);
    return 2.0 * (a * std::sqrt(R * R - a * a) + R * R * std::asin(a / R));
  }

  double spatial_area() const {
    if (tube > 0.0) return strip_disk_area(rho_hi(), tube) - strip_disk_area(rho_lo(), tube);
    return gamma * (rho_hi() * rho_hi() - rho_lo() * rho_lo());
  }

  double volume() const { return spatial_area() * 2.0 * (h_hi() - h_lo()); }

  Vec2 sample_xi(std::mt19937_64& g) const {
    const double r0 = rho_lo(), r1 = rho_hi();
    if (tube > 0.0) {
      const double a = std::min(tube, r1);
      const Vec2 perp{-omega.y, omega.x};
      for (;;) {
        const double y = uniform(g, -a, a);
        const double xhi = std::sqrt(r1 * r1 - y * y);
        const double xlo = std::sqrt(std::max(r0 * r0 - y * y, 0.0));
        if (uniform(g, 0.0, r1) > xhi - xlo) continue;
        const double x = uniform(g, xlo, xhi) * (uniform(g) < 0.5 ? 1.0 : -1.0);
        return omega * x + perp * y;
      }
    }
    const double rho = std::sqrt(uniform(g, r0 * r0, r1 * r1));
    const Vec2 base = sign * omega;
    return unit_vector(std::atan2(base.y, base.x) + uniform(g, -gamma, gamma)) * rho;
  }

  void sample(std::mt19937_64& g, double& tau, Vec2& xi) const {
    xi = sample_xi(g);
    const double h = uniform(g, h_lo(), h_hi()) * (uniform(g) < 0.5 ? 1.0 : -1.0);
    tau = h - sign * norm(xi);
  }
};

enum class ProductWeight { none, theta12 };

/// ||P_{K0} B(u1, conj u2)|| for L2-normalized flat packets u_j = chi_{S_j} / |S_j|^{1/2}, by
/// |S1| E[w(X1, X2) w(Y, Y - X0) 1_{S2}(Y - X0) 1_{K0}(X0)] with X0 = X1 - X2, X1, Y ~ S1, X2 ~ S2.
inline double bilinear_product_norm(const PacketSupport& s1, const PacketSupport& s2, const PacketSupport* k0,
                                    ProductWeight w, long samples, std::mt19937_64& g) {
  auto weight = [&](Vec2 a, Vec2 b) {
    if (w == ProductWeight::none) return 1.0;
    const Vec2 p = s1.sign * a, q = s2.sign * b;
    if ((p.x == 0.0 && p.y == 0.0) || (q.x == 0.0 && q.y == 0.0)) return 0.0;
    return angle(p, q);
  };
  double acc = 0.0;
  for (long m = 0; m < samples; ++m) {
    double t1, t2, ty;
    Vec2 x1, x2, y;
    s1.sample(g, t1, x1);
    s2.sample(g, t2, x2);
    s1.sample(g, ty, y);
    const double t0 = t1 - t2;
    const Vec2 x0 = x1 - x2;
    if (k0 && !k0->contains(t0, x0)) continue;
    const Vec2 z = y - x0;
    if (!s2.contains(ty - t0, z)) continue;
    acc += weight(x1, x2) * weight(y, z);
  }
  return std::sqrt(s1.volume() * acc / static_cast<double>(samples));
}

// ---------------------------------------------------------------------------
// Right-hand sides of the basic bilinear estimates

struct ShellTriple {
  double N0, N1, N2, L0, L1, L2;
};

inline double bilinear1_bound(const ShellTriple& s) {
  const double n012 = std::min({s.N0, s.N1, s.N2}), n12 = std::min(s.N1, s.N2);
  return std::sqrt(n012 * std::min(s.L1, s.L2)) * std::pow(n12 * std::max(s.L1, s.L2), 0.25);
}

/// j = 1 or 2.
inline double bilinear2_bound(const ShellTriple& s, int j) {
  const double Nj = j == 1 ? s.N1 : s.N2, Lj = j == 1 ? s.L1 : s.L2;
  const double n012 = std::min({s.N0, s.N1, s.N2});
  return std::sqrt(n012 * std::min(s.L0, Lj)) * std::pow(std::min(s.N0, Nj) * std::max(s.L0, Lj), 0.25);
}

inline double bilinear3_bound(const ShellTriple& s) {
  std::array<double, 3> L{s.L0, s.L1, s.L2};
  std::sort(L.begin(), L.end());
  const double n012 = std::min({s.N0, s.N1, s.N2}), n12 = std::min(s.N1, s.N2);
  return std::pow(n012 * n12 * s.N0 * L[1], 0.25) * std::sqrt(L[0]);
}

inline double sobolev_type_bound(const ShellTriple& s) {
  const double n012 = std::min({s.N0, s.N1, s.N2});
  return std::sqrt(n012 * n012 * std::min({s.L0, s.L1, s.L2}));
}

// ---------------------------------------------------------------------------
// Scaling sweeps

struct SweepPoint {
  double x = 0.0;    // swept parameter
  double lhs = 0.0;  // measured norm
  double rhs = 0.0;  // theorem right-hand side
};

struct ScalingSweep {
  std::string name;
  double target_slope = 0.0;
  bool fit_slope = true;
  std::vector<SweepPoint> points = {};

  double slope() const {
    std::vector<double> x, y;
    for (const auto& p : points) {
      x.push_back(p.x);
      y.push_back(p.lhs);
    }
    return loglog_slope(x, y);
  }
  /// max / min of lhs / rhs over the sweep.
  double spread() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : points) {
      const double r = p.lhs / p.rhs;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return hi / lo;
  }
};

inline constexpr double kSlopeTolerance = 0.15;
inline constexpr double kSpreadLimit = 10.0;

struct BilinearConfig {
  long samples = 400000;  // Monte Carlo draws per sweep point
  int max_exponent = 6;   // dyadic N, L up to 2^max_exponent
  double N_sweep = 64.0;  // fixed N for the L and r sweeps
};

inline std::vector<double> dyadic_range(int lo, int hi) {
  std::vector<double> v;
  for (int k = lo; k <= hi; ++k) v.push_back(std::ldexp(1.0, k));
  return v;
}

/// Product norm at sweep point i of the named sweep, seeded per point.
inline double sweep_norm(const VerifierConfig& cfg, const BilinearConfig& bc, const std::string& name, std::size_t i,
                         const PacketSupport& a, const PacketSupport& b, ProductWeight w,
                         const PacketSupport* k0 = nullptr) {
  auto g = trial_rng(cfg.seed, name_hash(name), i);
  return bilinear_product_norm(a, b, k0, w, bc.samples, g);
}

/// L_min^{1/2}: L1 swept below a fixed L2 = 2^max at N1 = N2 = N.
inline ScalingSweep sweep_l_min(const VerifierConfig& cfg, const BilinearConfig& bc) {
  ScalingSweep s{"Bilinear1.L_min", 0.5};
  const double N = bc.N_sweep, L2 = std::ldexp(1.0, bc.max_exponent);
  const auto L1s = dyadic_range(0, bc.max_exponent);
  for (std::size_t i = 0; i < L1s.size(); ++i) {
    const PacketSupport a{N, L1s[i], 1}, b{N, L2, -1};
    const double lhs = sweep_norm(cfg, bc, s.name, i, a, b, ProductWeight::none);
    s.points.push_back({L1s[i], lhs, bilinear1_bound({N, N, N, 1.0, L1s[i], L2})});
  }
  return s;
}

/// (N_min L_max)^{1/4}: L2 swept above L1 = 1 at N1 = N2 = N.
inline ScalingSweep sweep_l_max(const VerifierConfig& cfg, const BilinearConfig& bc) {
  ScalingSweep s{"Bilinear1.L_max", 0.25};
  const double N = bc.N_sweep;
  const auto L2s = dyadic_range(0, bc.max_exponent);
  for (std::size_t i = 0; i < L2s.size(); ++i) {
    const PacketSupport a{N, 1.0, 1}, b{N, L2s[i], -1};
    const double lhs = sweep_norm(cfg, bc, s.name, i, a, b, ProductWeight::none);
    s.points.push_back({L2s[i], lhs, bilinear1_bound({N, N, N, 1.0, 1.0, L2s[i]})});
  }
  return s;
}

/// r^{1/2}: tube radius swept for theta12-weighted products at L1 = L2 = 1.
inline ScalingSweep sweep_null_ray(const VerifierConfig& cfg, const BilinearConfig& bc) {
  ScalingSweep s{"NullRay.r", 0.5};
  const double N = bc.N_sweep;
  const auto rs = dyadic_range(0, bc.max_exponent - 1);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    PacketSupport a{N, 1.0, 1};
    a.tube = rs[i];
    const PacketSupport b{N, 1.0, -1};
    const double lhs = sweep_norm(cfg, bc, s.name, i, a, b, ProductWeight::theta12);
    s.points.push_back({rs[i], lhs, std::sqrt(rs[i])});
  }
  return s;
}

/// Bilinear1 ratio over the grid N in {1..2^max}, L1 <= L2 in {1..2^max}; spread only.
inline ScalingSweep sweep_bilinear1_grid(const VerifierConfig& cfg, const BilinearConfig& bc) {
  ScalingSweep s{"Bilinear1.grid", 0.0, false};
  const auto D = dyadic_range(0, bc.max_exponent);
  std::size_t i = 0;
  BilinearConfig light = bc;
  light.samples = std::max(1L, bc.samples / 4);
  for (double N : D)
    for (double L1 : D)
      for (double L2 : D) {
        if (L2 < L1) continue;
        const PacketSupport a{N, L1, 1}, b{N, L2, -1};
        const double lhs = sweep_norm(cfg, light, s.name, i++, a, b, ProductWeight::none);
        s.points.push_back({N, lhs, bilinear1_bound({N, N, N, 1.0, L1, L2})});
      }
  return s;
}

/// Unit shells with the K0 projection: ratios to the four basic bounds, spread across the four.
inline ScalingSweep unit_shell_bounds(const VerifierConfig& cfg, const BilinearConfig& bc) {
  ScalingSweep s{"BasicBilinear.unit_shell", 0.0, false};
  const PacketSupport a{1.0, 1.0, 1}, b{1.0, 1.0, -1}, k0{1.0, 1.0, 1};
  const double lhs = sweep_norm(cfg, bc, s.name, 0, a, b, ProductWeight::none, &k0);
  const ShellTriple t{1, 1, 1, 1, 1, 1};
  const double bounds[] = {bilinear1_bound(t), bilinear2_bound(t, 1), bilinear3_bound(t), sobolev_type_bound(t)};
  for (int k = 0; k < 4; ++k) s.points.push_back({double(k + 1), lhs, bounds[k]});
  return s;
}

// ---------------------------------------------------------------------------
// Time cutoff: ||rho_T u||_{X^{0,b;1}} ~ T^{1/2 - b} ||u||_{X^{0,1/2;1}}

struct Cutoff2Config {
  double box_period = 2.0 * kPi;
  int n = 8;
  double window = 2.0;
  int nt = 16384;
  int T_exp_lo = 3, T_exp_hi = 8;  // T = 2^-k
};

/// Localized free wave rho_1(t) e^{i(2 x - 2 t)}; the sweep runs b in {1/8, 1/4, 3/8}.
inline std::vector<ScalingSweep> sweep_cutoff2(const Cutoff2Config& cc = {}) {
  const Grid2D g(cc.box_period, cc.n);
  const SpaceTimeGrid st(g, cc.window, cc.nt);
  const auto u = SpaceTimeField::from_function(
      st, [](double t, Vec2 x) { return CutoffFunction(1.0)(t) * std::exp(cplx(0.0, 2.0 * x.x - 2.0 * t)); });
  const double x12 = xsb_norm(u, 0.0, 0.5, SumKind::l1, md2d::Phase::wave_plus).value;
  std::vector<ScalingSweep> out;
  for (double b : {0.125, 0.25, 0.375}) {
    ScalingSweep s{"Cutoff2.b=" + std::string(b == 0.125 ? "1/8" : b == 0.25 ? "1/4" : "3/8"), 0.5 - b};
    for (int k = cc.T_exp_lo; k <= cc.T_exp_hi; ++k) {
      const double T = std::ldexp(1.0, -k);
      const double lhs = xsb_norm(multiply_by_cutoff(u, CutoffFunction(T)), 0.0, b, SumKind::l1,
                                  md2d::Phase::wave_plus).value;
      s.points.push_back({T, lhs, std::pow(T, 0.5 - b) * x12});
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Slope within tolerance (when fitted) and lhs/rhs spread within the limit.
inline CheckResult sweep_result(const ScalingSweep& s, const VerifierConfig& cfg, std::vector<EvidenceRow>& rows,
                                std::map<std::string, double>& slopes) {
  CheckResult c;
  c.name = s.name;
  c.mode = Mode::range;
  c.trials = static_cast<long>(s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    const double r = safe_ratio(p.lhs, p.rhs);
    c.max_ratio = std::max(c.max_ratio, r);
    c.min_ratio = std::min(c.min_ratio, r);
    rows.push_back({s.name, Phase::assert, i, p.lhs, p.rhs, r, "x=" + std::to_string(p.x)});
  }
  const double spread = s.spread();
  c.info["spread"] = spread;
  c.info["spread_limit"] = kSpreadLimit * cfg.constant_scale;
  bool ok = std::isfinite(spread) && spread <= kSpreadLimit * cfg.constant_scale;
  if (s.fit_slope) {
    const double m = s.slope();
    slopes[s.name] = m;
    c.info["slope"] = m;
    c.info["target_slope"] = s.target_slope;
    ok = ok && std::abs(m - s.target_slope) <= kSlopeTolerance * cfg.constant_scale;
  }
  c.pass = ok;
  if (!ok) {
    c.violations = 1;
    for (auto& r : rows) r.violation = true;
  }
  return c;
}

inline LemmaReport verify_bilinear_scaling(const VerifierConfig& cfg, const RowSink& sink = {},
                                           const BilinearConfig& bc = {}) {
  LemmaReport rep;
  rep.lemma = "BilinearScaling";
  const std::vector<ScalingSweep> sweeps{sweep_l_min(cfg, bc), sweep_l_max(cfg, bc), sweep_null_ray(cfg, bc),
                                         sweep_bilinear1_grid(cfg, bc), unit_shell_bounds(cfg, bc)};
  for (const auto& s : sweeps) {
    rep.trials += static_cast<long>(s.points.size());
    std::vector<EvidenceRow> rows;
    CheckResult c = sweep_result(s, cfg, rows, rep.slope_estimates);
    rep.add(std::move(c), rows, sink);
  }
  rep.note = "flat packets on continuum K-sets; Monte Carlo draws per point: " + std::to_string(bc.samples);
  return rep;
}

inline LemmaReport verify_cutoff2(const VerifierConfig& cfg, const RowSink& sink = {}, const Cutoff2Config& cc = {}) {
  LemmaReport rep;
  rep.lemma = "Cutoff2";
  for (const auto& s : sweep_cutoff2(cc)) {
    rep.trials += static_cast<long>(s.points.size());
    std::vector<EvidenceRow> rows;
    CheckResult c = sweep_result(s, cfg, rows, rep.slope_estimates);
    rep.add(std::move(c), rows, sink);
  }
  return rep;
}

}  // namespace md2d::verify
