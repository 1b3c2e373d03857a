#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "md2d/continuation.hpp"
#include "md2d/error.hpp"
#include "md2d/initial_data.hpp"

namespace md2d {

struct GridConfig {
  int n = 128;
  double box_period = 2.0 * kPi * 8.0;
  double dealias = 2.0 / 3.0;
};

struct PhysicsConfig {
  double M = 1.0;
  double epsilon = 0.1;
};

struct IntegratorConfig {
  double dt = 1.0 / 256;
  double T = 0.5;
  int record_every = 1;
  double norm_T = 1.0;  // T used in the D_T and D~_T columns
};

struct SchedulerConfig {
  double t_max = 0.05;
  int max_stages = 4;
  int max_windows = 1024;
  double magic_C = 1.6;
  std::vector<double> epsilon_sweep;  // nonempty: one schedule per value
};

struct VerifierSettings {
  std::uint64_t seed = 20240607;
  long trials = 0;  // 0: per-lemma defaults
  std::vector<std::string> lemmas;  // empty: all
  double margin = 1.05;
  double constant_scale = 1.0;
};

struct OutputConfig {
  std::string directory = "md2d_out";
  std::set<std::string> formats{"csv"};
};

struct AppConfig {
  GridConfig grid;
  DataSpec data;
  PhysicsConfig physics;
  IntegratorConfig integrator;
  SchedulerConfig scheduler;
  VerifierSettings verifier;
  OutputConfig output;

  AppConfig() {
    data.psi.amplitude = 0.1;
    data.psi.width = 2.0;
    data.psi.momentum = {0.5, 0.25};
    data.psi.seed = 1;
    data.E = FieldSpec::band(3, 0.0, 0.2, 1.5);
    data.B = FieldSpec::band(4, 0.0, 0.2, 1.5);
  }

  Grid2D make_grid() const { return Grid2D(grid.box_period, grid.n, grid.dealias); }
};

namespace config_detail {

/// 1-based line of the first occurrence of "key" in the source text; 0 when absent.
inline int line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

/// Walks one JSON object, tracks consumed keys and rejects the rest.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path, const std::string& text, const std::string& source)
      : j_(j), path_(std::move(path)), text_(text), source_(source) {
    if (!j_.is_object()) fail(path_.empty() ? "root" : path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (const int line = line_of(text_, key); line > 0) os << ':' << line;
    os << ": " << (path_.empty() ? "" : path_ + "/") << key << ": " << what;
    throw ConfigError(os.str());
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const nlohmann::json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.at(key), path_ + "/" + key, text_, source_);
  }

  void number(const std::string& key, double& out, double lo, double hi, bool lo_open = false) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number()) fail(key, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || x > hi || x < lo || (lo_open && x == lo)) {
      std::ostringstream os;
      os << "value " << x << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
      fail(key, os.str());
    }
    out = x;
  }

  template <class Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    const long long x = v->get<long long>();
    if (x < lo || x > hi) fail(key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                        std::to_string(hi) + "]");
    out = static_cast<Int>(x);
  }

  void seed(const std::string& key, std::uint64_t& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      fail(key, "expected a nonnegative integer");
    out = v->get<std::uint64_t>();
  }

  void string(const std::string& key, std::string& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_string()) fail(key, "expected a string");
    out = v->get<std::string>();
  }

  void vec2(const std::string& key, Vec2& out) {
    const auto* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      fail(key, "expected [x, y]");
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    if (!std::isfinite(out.x) || !std::isfinite(out.y)) fail(key, "non-finite component");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  const std::string& text_;
  const std::string& source_;
  std::set<std::string> seen_;
};

inline void read_field(Reader r, FieldSpec& f, bool spinor) {
  if (const auto* p = r.get("profile")) {
    if (!p->is_string()) r.fail("profile", "expected a string");
    const auto s = p->get<std::string>();
    if (s == "gaussian") f.profile = Profile::gaussian;
    else if (s == "random_band") f.profile = Profile::random_band;
    else r.fail("profile", "expected \"gaussian\" or \"random_band\"");
  }
  r.seed("seed", f.seed);
  r.number("amplitude", f.amplitude, 0.0, 1e6);
  r.number("width", f.width, 0.0, 1e6, true);
  r.number("band_min", f.band_min, 0.0, 1e6);
  r.number("band_max", f.band_max, 0.0, 1e6, true);
  if (f.band_min > f.band_max) r.fail("band_min", "must not exceed band_max");
  if (r.has("center")) {
    Vec2 c;
    r.vec2("center", c);
    f.center = c;
  }
  if (spinor) {
    r.vec2("momentum", f.momentum);
    Vec2 pol{f.polarization[0], f.polarization[1]};
    r.vec2("polarization", pol);
    if (pol.x == 0.0 && pol.y == 0.0) r.fail("polarization", "must be nonzero");
    f.polarization = {pol.x, pol.y};
  }
  r.finish();
}

}  // namespace config_detail

/// Strict parse: unknown keys are rejected and every number is range-checked.
inline AppConfig parse_config(const std::string& text, const std::string& source = "config") {
  using config_detail::Reader;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  AppConfig c;
  Reader root(j, "", text, source);
  if (root.has("grid")) {
    Reader r = root.child("grid");
    r.integer("n", c.grid.n, 4, 4096);
    if (c.grid.n % 2 != 0) r.fail("n", "must be even");
    r.number("box_period", c.grid.box_period, 0.0, 1e6, true);
    r.number("dealias", c.grid.dealias, 0.0, 1.0, true);
    r.finish();
  }
  if (root.has("data")) {
    Reader r = root.child("data");
    if (r.has("psi")) config_detail::read_field(r.child("psi"), c.data.psi, true);
    if (r.has("E")) config_detail::read_field(r.child("E"), c.data.E, false);
    if (r.has("B")) config_detail::read_field(r.child("B"), c.data.B, false);
    r.finish();
  }
  if (root.has("physics")) {
    Reader r = root.child("physics");
    r.number("M", c.physics.M, -1e3, 1e3);
    r.number("epsilon", c.physics.epsilon, 0.0, 1.0, true);
    r.finish();
  }
  if (root.has("integrator")) {
    Reader r = root.child("integrator");
    r.number("dt", c.integrator.dt, 0.0, 1.0, true);
    r.number("T", c.integrator.T, 0.0, 1e4, true);
    r.integer("record_every", c.integrator.record_every, 1, 1000000);
    r.number("norm_T", c.integrator.norm_T, 0.0, 1.0, true);
    r.finish();
  }
  if (root.has("scheduler")) {
    Reader r = root.child("scheduler");
    r.number("t_max", c.scheduler.t_max, 0.0, 1e4, true);
    r.integer("max_stages", c.scheduler.max_stages, 1, 10000);
    r.integer("max_windows", c.scheduler.max_windows, 1, 1000000);
    r.number("magic_C", c.scheduler.magic_C, 1.0, 1e3);
    if (const auto* v = r.get("epsilon_sweep")) {
      if (!v->is_array()) r.fail("epsilon_sweep", "expected an array of numbers");
      for (const auto& e : *v) {
        if (!e.is_number() || !(e.get<double>() > 0.0 && e.get<double>() <= 1.0))
          r.fail("epsilon_sweep", "entries must be numbers in (0, 1]");
        c.scheduler.epsilon_sweep.push_back(e.get<double>());
      }
    }
    r.finish();
  }
  if (root.has("verifier")) {
    Reader r = root.child("verifier");
    r.seed("seed", c.verifier.seed);
    r.integer("trials", c.verifier.trials, 0, 100000000);
    if (c.verifier.trials != 0 && c.verifier.trials < 1000) r.fail("trials", "must be 0 (defaults) or >= 1000");
    if (const auto* v = r.get("lemmas")) {
      if (!v->is_array()) r.fail("lemmas", "expected an array of names");
      for (const auto& e : *v) {
        if (!e.is_string()) r.fail("lemmas", "expected an array of names");
        c.verifier.lemmas.push_back(e.get<std::string>());
      }
    }
    r.number("margin", c.verifier.margin, 1.0, 10.0);
    r.number("constant_scale", c.verifier.constant_scale, 0.0, 10.0, true);
    r.finish();
  }
  if (root.has("output")) {
    Reader r = root.child("output");
    r.string("directory", c.output.directory);
    if (c.output.directory.empty()) r.fail("directory", "must be nonempty");
    if (const auto* v = r.get("formats")) {
      if (!v->is_array()) r.fail("formats", "expected an array");
      c.output.formats.clear();
      for (const auto& e : *v) {
        if (!e.is_string() || (e != "csv" && e != "dump")) r.fail("formats", "entries must be \"csv\" or \"dump\"");
        c.output.formats.insert(e.get<std::string>());
      }
    }
    r.finish();
  }
  root.finish();
  return c;
}

inline AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

inline nlohmann::json field_to_json(const FieldSpec& f, bool spinor) {
  nlohmann::json j{{"profile", f.profile == Profile::gaussian ? "gaussian" : "random_band"},
                   {"seed", f.seed},
                   {"amplitude", f.amplitude},
                   {"width", f.width},
                   {"band_min", f.band_min},
                   {"band_max", f.band_max}};
  if (f.center) j["center"] = {f.center->x, f.center->y};
  if (spinor) {
    j["momentum"] = {f.momentum.x, f.momentum.y};
    j["polarization"] = {f.polarization[0], f.polarization[1]};
  }
  return j;
}

/// Resolved configuration; parse_config(to_json(c).dump()) reproduces c.
inline nlohmann::json to_json(const AppConfig& c) {
  return {{"grid", {{"n", c.grid.n}, {"box_period", c.grid.box_period}, {"dealias", c.grid.dealias}}},
          {"data",
           {{"psi", field_to_json(c.data.psi, true)},
            {"E", field_to_json(c.data.E, false)},
            {"B", field_to_json(c.data.B, false)}}},
          {"physics", {{"M", c.physics.M}, {"epsilon", c.physics.epsilon}}},
          {"integrator",
           {{"dt", c.integrator.dt},
            {"T", c.integrator.T},
            {"record_every", c.integrator.record_every},
            {"norm_T", c.integrator.norm_T}}},
          {"scheduler",
           {{"t_max", c.scheduler.t_max},
            {"max_stages", c.scheduler.max_stages},
            {"max_windows", c.scheduler.max_windows},
            {"magic_C", c.scheduler.magic_C},
            {"epsilon_sweep", c.scheduler.epsilon_sweep}}},
          {"verifier",
           {{"seed", c.verifier.seed},
            {"trials", c.verifier.trials},
            {"lemmas", c.verifier.lemmas},
            {"margin", c.verifier.margin},
            {"constant_scale", c.verifier.constant_scale}}},
          {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}}};
}

}  // namespace md2d
