#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "md2d/error.hpp"
#include "md2d/verifier/harness.hpp"

namespace md2d::verify {

inline constexpr const char* kEvidenceHeader = "check,phase,sample_id,lhs,rhs,ratio,tag,violation";

inline void write_evidence_row(std::ostream& os, const EvidenceRow& r) {
  os << r.check << ',' << phase_name(r.phase) << ',' << r.id << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ','
     << r.tag << ',' << (r.violation ? 1 : 0) << '\n';
}

/// Streams rows of one lemma into a CSV file; the header is written on open.
class EvidenceWriter {
 public:
  explicit EvidenceWriter(const std::filesystem::path& path) : path_(path), os_(path) {
    if (!os_) throw IoError("cannot open evidence file " + path.string());
    os_ << std::setprecision(17) << kEvidenceHeader << '\n';
  }

  RowSink sink() {
    return [this](const std::vector<EvidenceRow>& rows) {
      for (const auto& r : rows) write_evidence_row(os_, r);
      if (!os_) throw IoError("write failed for " + path_.string());
    };
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

inline void write_failures(const std::filesystem::path& path, const LemmaReport& rep) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open failure dump " + path.string());
  os << std::setprecision(17) << kEvidenceHeader << '\n';
  for (const auto& r : rep.failures) write_evidence_row(os, r);
}

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::calibrated: return "calibrated";
    case Mode::absolute: return "absolute";
    case Mode::range: return "range";
  }
  return "";
}

/// Non-finite values become null.
inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j{{"name", c.name},
                   {"mode", mode_name(c.mode)},
                   {"trials", c.trials},
                   {"skipped", c.skipped},
                   {"calibration_max", json_number(c.calibration_max)},
                   {"max_ratio", json_number(c.max_ratio)},
                   {"min_ratio", json_number(c.min_ratio)},
                   {"violations", c.violations},
                   {"pass", c.pass}};
  nlohmann::json info = nlohmann::json::object();
  for (const auto& [k, v] : c.info) info[k] = json_number(v);
  j["info"] = info;
  return j;
}

inline nlohmann::json to_json(const LemmaReport& r) {
  nlohmann::json slopes = nlohmann::json::object();
  for (const auto& [k, v] : r.slope_estimates) slopes[k] = json_number(v);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  nlohmann::json j{{"lemma", r.lemma},       {"trials", r.trials}, {"max_ratio", json_number(r.max_ratio())},
                   {"slope_estimates", slopes}, {"pass", r.pass},     {"checks", checks}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::json summary_json(const std::vector<LemmaReport>& reports) {
  nlohmann::json a = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    a.push_back(to_json(r));
    all = all && r.pass;
  }
  return {{"all_pass", all}, {"lemmas", a}};
}

}  // namespace md2d::verify
