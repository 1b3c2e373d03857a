#pragma once

#include <set>
#include <utility>

#include "md2d/grid.hpp"
#include "md2d/norms.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

struct MagicSweep {
  double box_period = 2.0 * kPi * 4.0;
  int n = 128;
  /// S, T are drawn log-uniformly in [S_min, 1]; 1/S_min stays inside the coarse lattice.
  double S_min = 0.125;
  int modes_per_shell = 24;
  /// Lattice size used for drawing; 0 means n.  Draws on a finer lattice are truncated to the
  /// band of n, so two sweeps sharing draw_n see the same samples.
  int draw_n = 0;
};

/// Modes of `f` representable on `g` inside its dealiased band.
inline std::vector<SparseMode> restrict_to_band(const std::vector<SparseMode>& f, const Grid2D& g) {
  const int n = g.n();
  const double dk = g.dk(), kmax = dk * g.dealias_cutoff();
  auto idx = [n](int m) { return m >= 0 ? m : m + n; };
  std::vector<SparseMode> out;
  for (const auto& m : f) {
    const int m1 = static_cast<int>(std::lround(m.xi.x / dk)), m2 = static_cast<int>(std::lround(m.xi.y / dk));
    if (std::abs(m1) >= n / 2 || std::abs(m2) >= n / 2 || !g.keeps(idx(m1), idx(m2))) continue;
    if (norm(m.xi) > kmax) continue;
    out.push_back(m);
  }
  return out;
}

/// Random field with a power-law shell profile: shell j carries amplitude 2^{alpha j}
/// times a log-normal factor, spread over up to `per_shell` distinct lattice points.
inline std::vector<SparseMode> random_shell_profile(const Grid2D& g, std::mt19937_64& r, int per_shell) {
  const int n = g.n();
  const double dk = g.dk();
  auto idx = [n](int m) { return m >= 0 ? m : m + n; };
  const double kmax = dk * g.dealias_cutoff();
  int jlo = dyadic_exponent(dk), jhi = dyadic_exponent(kmax);
  if (uniform(r) < 0.5) {
    const int a = jlo + static_cast<int>(uniform(r, 0.0, jhi - jlo + 1.0));
    const int b = jlo + static_cast<int>(uniform(r, 0.0, jhi - jlo + 1.0));
    jlo = std::min(a, b);
    jhi = std::max(a, b);
  }
  const double alpha = uniform(r, -1.5, 1.5);
  std::vector<SparseMode> out;
  std::set<std::pair<int, int>> used;
  for (int j = jlo; j <= jhi; ++j) {
    const double amp = std::pow(2.0, alpha * j) * std::exp(0.5 * gaussian(r));
    const double rlo = std::ldexp(1.0, j), rhi = std::min(2.0 * rlo, kmax);
    int got = 0;
    for (int tries = 0; got < per_shell && tries < 20 * per_shell; ++tries) {
      const Vec2 p = unit_vector(uniform(r, -kPi, kPi)) * (uniform(r, rlo, rhi) / dk);
      const int m1 = static_cast<int>(std::lround(p.x)), m2 = static_cast<int>(std::lround(p.y));
      const double q = dk * std::hypot(m1, m2);
      if (q < rlo || q >= 2.0 * rlo || q > kmax) continue;
      if (std::abs(m1) >= n / 2 || std::abs(m2) >= n / 2 || !g.keeps(idx(m1), idx(m2))) continue;
      if (!used.insert({m1, m2}).second) continue;
      out.push_back({{dk * m1, dk * m2}, amp * cplx(gaussian(r), gaussian(r))});
      ++got;
    }
  }
  return out;
}

inline CheckSpec magic_monotone_check(const MagicSweep& sw, const std::string& name = "MagicMonotone") {
  const Grid2D g(sw.box_period, sw.n);
  const Grid2D gd(sw.box_period, sw.draw_n > 0 ? sw.draw_n : sw.n);
  return {name, [g, gd, sw](std::mt19937_64& r, std::uint64_t) {
            auto f = random_shell_profile(gd, r, sw.modes_per_shell);
            if (gd.n() != g.n()) f = restrict_to_band(f, g);
            double S = log_uniform(r, sw.S_min, 1.0), T = log_uniform(r, sw.S_min, 1.0);
            if (S > T) std::swap(S, T);
            const double a = magic_parts(f, g.box_period(), S).total();
            const double b = magic_parts(f, g.box_period(), T).total();
            if (b == 0.0) return Sample{0, 0, "", true};
            return Sample{a, b};
          }};
}

inline constexpr double kRefinementTolerance = 0.05;

/// Calibrate-then-assert on the base grid, then the same samples resolved on the refined grid.
inline LemmaReport verify_magic_monotone(const VerifierConfig& cfg, const RowSink& sink = {}, MagicSweep sw = {},
                                         int refined_n = 256) {
  LemmaReport rep;
  rep.lemma = "MagicMonotone";
  rep.trials = cfg.trials;
  std::vector<EvidenceRow> rows;
  sw.draw_n = std::max(sw.n, refined_n);
  CheckResult base = run_check(magic_monotone_check(sw), cfg, &rows);
  MagicSweep fine = sw;
  fine.n = refined_n;
  CheckResult ref = run_check(magic_monotone_check(fine), cfg, nullptr);
  const double c0 = std::max(base.calibration_max, base.max_ratio);
  const double c1 = std::max(ref.calibration_max, ref.max_ratio);
  const double change = std::abs(c1 - c0) / c0;
  base.info["refined_sup"] = c1;
  base.info["refinement_change"] = change;
  base.pass = base.pass && ref.pass && change <= kRefinementTolerance;
  rep.add(base, rows, sink);
  return rep;
}

}  // namespace md2d::verify
