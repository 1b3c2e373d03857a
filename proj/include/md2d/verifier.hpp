#pragma once

#include <string>
#include <vector>

#include "md2d/verifier/bilinear.hpp"
#include "md2d/verifier/combinatorial.hpp"
#include "md2d/verifier/energy.hpp"
#include "md2d/verifier/harness.hpp"
#include "md2d/verifier/magic.hpp"
#include "md2d/verifier/null_suite.hpp"
#include "md2d/verifier/report.hpp"

namespace md2d::verify {

struct LemmaEntry {
  std::string name;
  long default_trials = 0;  // 0: deterministic sweep, trial count not configurable
  std::function<LemmaReport(const VerifierConfig&, const RowSink&)> run;
};

inline LemmaEntry check_list_entry(const std::string& name, long trials, std::vector<CheckSpec> (*checks)()) {
  return {name, trials, [name, checks](const VerifierConfig& cfg, const RowSink& sink) {
            return run_checks(name, checks(), cfg, sink);
          }};
}

inline std::vector<CheckSpec> single(CheckSpec c) { return {std::move(c)}; }

/// Every verifiable lemma, in default run order.
inline const std::vector<LemmaEntry>& lemma_registry() {
  static const std::vector<LemmaEntry> reg = [] {
    std::vector<LemmaEntry> r;
    r.push_back(check_list_entry("NullLemma1", 100000, null_lemma1_checks));
    r.push_back(check_list_entry("NullLemma2", 100000, null_lemma2_checks));
    r.push_back(check_list_entry("AnglesLemma", 100000, angles_lemma_checks));
    r.push_back(check_list_entry("FLemma", 100000, f_lemma_checks));
    r.push_back(check_list_entry("SigmaTrilinear", 100000, sigma_trilinear_checks));
    r.push_back(check_list_entry("NLemma", 100000, n_lemma_checks));
    r.push_back(check_list_entry("HyperLemma", 10000, [] { return single(hyper_lemma_check()); }));
    r.push_back(check_list_entry("WhitneyLemma1", 10000, [] { return single(whitney1_check()); }));
    r.push_back(check_list_entry("WhitneyLemma2", 10000, [] { return single(whitney2_check()); }));
    r.push_back(check_list_entry("ShellInclusion", 10000, [] { return single(set_inclusion_check()); }));
    r.push_back(check_list_entry("OmegaSum", 10000, omega_sum_checks));
    r.push_back(check_list_entry("EnergyLemma", 1000, energy_lemma_checks));
    r.push_back({"MagicMonotone", 10000,
                 [](const VerifierConfig& cfg, const RowSink& sink) { return verify_magic_monotone(cfg, sink); }});
    r.push_back({"BilinearScaling", 0,
                 [](const VerifierConfig& cfg, const RowSink& sink) { return verify_bilinear_scaling(cfg, sink); }});
    r.push_back({"Cutoff2", 0, [](const VerifierConfig& cfg, const RowSink& sink) { return verify_cutoff2(cfg, sink); }});
    return r;
  }();
  return reg;
}

inline const LemmaEntry& find_lemma(const std::string& name) {
  for (const auto& e : lemma_registry())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : lemma_registry()) known += (known.empty() ? "" : ", ") + e.name;
  throw ConfigError("unknown lemma '" + name + "' (known: " + known + ")");
}

/// trials > 0 overrides the lemma default; sweep lemmas ignore it.
inline LemmaReport run_lemma(const LemmaEntry& e, VerifierConfig cfg, const RowSink& sink = {}, long trials = 0) {
  cfg.trials = trials > 0 ? trials : (e.default_trials > 0 ? e.default_trials : 1);
  LemmaReport r = e.run(cfg, sink);
  if (e.default_trials == 0) r.note = r.note.empty() ? "deterministic sweep" : r.note;
  return r;
}

}  // namespace md2d::verify
