#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "md2d/config.hpp"
#include "md2d/continuation.hpp"
#include "md2d/evolution.hpp"
#include "md2d/field_io.hpp"
#include "md2d/initial_data.hpp"
#include "md2d/verifier.hpp"

namespace md2d::app {

enum ExitCode : int { ok = 0, config_error = 1, numerics_error = 2, io_error = 3, lemma_failure = 4 };

/// Maps the error taxonomy onto exit codes; messages go to `err`.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const UsageError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return io_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return io_error;
  } catch (const NumericsError& e) {
    err << "numerics error: " << e.what() << '\n';
    return numerics_error;
  } catch (const PolicyError& e) {
    err << "numerics error: " << e.what() << '\n';
    return numerics_error;
  } catch (const ConstraintViolation& e) {
    err << "numerics error: " << e.what() << '\n';
    return numerics_error;
  }
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) throw IoError("cannot create output directory " + dir);
  return p;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed for " + p.string());
}

inline CoupledState initial_state(const AppConfig& c) {
  return make_state(make_data(c.make_grid(), c.data), c.physics.M);
}

// ---------------------------------------------------------------------------
// simulate

inline constexpr const char* kDiagnosticsHeader = "t,charge,gauss_residual,lorenz_residual,D_T,tildeD_T";

inline int cmd_simulate(const AppConfig& c, std::ostream& log) {
  const auto dir = prepare_dir(c.output.directory);
  IntervalOptions io;
  io.record_every = c.integrator.record_every;
  io.norm_T = c.integrator.norm_T;
  const Trajectory tr = solve_interval(initial_state(c), c.integrator.T, c.integrator.dt, io);
  {
    auto os = open_out(dir / "diagnostics.csv");
    os << kDiagnosticsHeader << '\n';
    for (const auto& r : tr.rows)
      os << r.diag.t << ',' << r.diag.charge << ',' << r.diag.gauss_residual << ',' << r.diag.lorenz_residual << ','
         << r.D_T << ',' << r.tildeD_T << '\n';
    if (!os) throw IoError("write failed for diagnostics.csv");
  }
  if (c.output.formats.count("dump")) {
    const Spinor psi = as_physical(tr.final_state.dirac.psi());
    write_field_dump((dir / "psi1_final.bin").string(), psi[0]);
    write_field_dump((dir / "psi2_final.bin").string(), psi[1]);
  }
  write_json(dir / "config.json", to_json(c));
  write_json(dir / "summary.json", {{"command", "simulate"},
                                    {"steps", tr.rows.size() - 1},
                                    {"t_final", tr.final_state.time()},
                                    {"charge_drift", tr.charge_drift()},
                                    {"max_gauss_residual", tr.max_gauss()},
                                    {"max_lorenz_residual", tr.max_lorenz()},
                                    {"config", to_json(c)}});
  log << "simulate: " << tr.rows.size() << " rows, relative charge drift " << tr.charge_drift() << '\n';
  return ok;
}

// ---------------------------------------------------------------------------
// schedule

inline constexpr const char* kScheduleHeader =
    "j,S_j,T_j,n_j,Delta_j,Dtilde_start,Dtilde_end,C_fit,tripling_ok,bridging_ok";

inline ScheduleOptions schedule_options(const AppConfig& c) {
  ScheduleOptions o;
  o.run.dt = c.integrator.dt;
  o.run.max_windows = c.scheduler.max_windows;
  o.run.t_max = c.scheduler.t_max;
  o.max_stages = c.scheduler.max_stages;
  o.magic_C = c.scheduler.magic_C;
  return o;
}

inline void write_schedule_csv(const std::filesystem::path& p, const SchedulerState& st) {
  auto os = open_out(p);
  os << kScheduleHeader << '\n';
  for (const auto& r : st.stages)
    os << r.j << ',' << r.S_end << ',' << r.T << ',' << r.n << ',' << r.Delta << ',' << r.D_start << ',' << r.D_end
       << ',' << r.C_fit << ',' << (r.tripling_ok ? "true" : "false") << ',' << (r.bridging_ok ? "true" : "false")
       << '\n';
  if (!os) throw IoError("write failed for " + p.string());
}

inline nlohmann::json schedule_summary(const SchedulerState& st) {
  return {{"epsilon", st.epsilon},
          {"stages", st.stages.size()},
          {"S_end", st.S.back()},
          {"reached_t_max", st.reached_t_max},
          {"all_tripling_ok", st.all_tripling_ok()},
          {"all_bridging_ok", st.all_bridging_ok()},
          {"max_Tj_residual", st.max_Tj_residual()},
          {"harmonic_min", st.harmonic_min},
          {"trend_ok", st.trend_ok}};
}

inline int cmd_schedule(const AppConfig& c, std::ostream& log) {
  const auto dir = prepare_dir(c.output.directory);
  const CoupledState init = initial_state(c);
  const ScheduleOptions o = schedule_options(c);
  const SchedulerState st = global_schedule(init, c.physics.epsilon, o);
  write_schedule_csv(dir / "schedule.csv", st);
  nlohmann::json summary{{"command", "schedule"}, {"run", schedule_summary(st)}, {"config", to_json(c)}};
  log << "schedule: " << st.stages.size() << " stages, S_end " << st.S.back() << '\n';
  if (!c.scheduler.epsilon_sweep.empty()) {
    auto os = open_out(dir / "epsilon_sweep.csv");
    os << "epsilon,stages,T_1,S_end,harmonic_min,all_tripling_ok,all_bridging_ok,max_Tj_residual\n";
    nlohmann::json sweep = nlohmann::json::array();
    for (double eps : c.scheduler.epsilon_sweep) {
      const SchedulerState s = global_schedule(init, eps, o);
      os << eps << ',' << s.stages.size() << ',' << (s.stages.empty() ? 0.0 : s.stages.front().T) << ','
         << s.S.back() << ',' << s.harmonic_min << ',' << (s.all_tripling_ok() ? "true" : "false") << ','
         << (s.all_bridging_ok() ? "true" : "false") << ',' << s.max_Tj_residual() << '\n';
      sweep.push_back(schedule_summary(s));
    }
    if (!os) throw IoError("write failed for epsilon_sweep.csv");
    summary["epsilon_sweep"] = sweep;
  }
  write_json(dir / "config.json", to_json(c));
  write_json(dir / "summary.json", summary);
  return ok;
}

// ---------------------------------------------------------------------------
// verify

inline int cmd_verify(const AppConfig& c, std::ostream& log) {
  const auto dir = prepare_dir(c.output.directory);
  const verify::ThreadLimit limit;
  std::vector<const verify::LemmaEntry*> todo;
  if (c.verifier.lemmas.empty())
    for (const auto& e : verify::lemma_registry()) todo.push_back(&e);
  else
    for (const auto& n : c.verifier.lemmas) todo.push_back(&verify::find_lemma(n));

  verify::VerifierConfig vc;
  vc.seed = c.verifier.seed;
  vc.margin = c.verifier.margin;
  vc.constant_scale = c.verifier.constant_scale;
  const bool csv = c.output.formats.count("csv") > 0;

  std::vector<verify::LemmaReport> reports;
  bool all_pass = true;
  for (const auto* e : todo) {
    std::optional<verify::EvidenceWriter> w;
    if (csv) w.emplace(dir / (e->name + ".csv"));
    auto rep = verify::run_lemma(*e, vc, w ? w->sink() : verify::RowSink{}, c.verifier.trials);
    log << "verify: " << rep.lemma << (rep.pass ? " PASS" : " FAIL") << " max_ratio " << rep.max_ratio() << '\n';
    if (!rep.pass) {
      all_pass = false;
      verify::write_failures(dir / (e->name + "_failures.csv"), rep);
    }
    reports.push_back(std::move(rep));
  }
  write_json(dir / "summary.json", verify::summary_json(reports));
  return all_pass ? ok : lemma_failure;
}

// ---------------------------------------------------------------------------
// plotdata

/// Columns of a header-first CSV keyed by name.
inline std::map<std::string, std::vector<std::string>> read_csv_columns(const std::filesystem::path& p,
                                                                        std::vector<std::string>& order) {
  std::ifstream is(p);
  if (!is) throw IoError("cannot read " + p.string());
  std::string line;
  if (!std::getline(is, line)) throw IoError(p.string() + ": empty file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  order = split(line);
  std::map<std::string, std::vector<std::string>> cols;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != order.size()) throw IoError(p.string() + ":" + std::to_string(lineno) + ": column count");
    for (std::size_t k = 0; k < cells.size(); ++k) cols[order[k]].push_back(cells[k]);
  }
  return cols;
}

inline constexpr const char* kPlotHeader = "quantity,t,value";

inline void write_long(const std::filesystem::path& p, const std::map<std::string, std::vector<std::string>>& cols,
                       const std::string& tcol, const std::vector<std::string>& quantities) {
  auto os = open_out(p);
  os << kPlotHeader << '\n';
  for (const auto& q : quantities) {
    const auto& t = cols.at(tcol);
    const auto& v = cols.at(q);
    for (std::size_t k = 0; k < t.size(); ++k) os << q << ',' << t[k] << ',' << v[k] << '\n';
  }
  if (!os) throw IoError("write failed for " + p.string());
}

inline int cmd_plotdata(const std::string& run_dir, std::ostream& log) {
  const std::filesystem::path dir(run_dir);
  if (!std::filesystem::is_directory(dir)) throw IoError("run directory " + run_dir + " does not exist");
  int written = 0;
  auto require = [](const std::map<std::string, std::vector<std::string>>& cols, const std::vector<std::string>& names,
                    const std::filesystem::path& p) {
    for (const auto& n : names)
      if (!cols.count(n)) throw IoError(p.string() + ": missing column " + n);
  };
  if (const auto p = dir / "diagnostics.csv"; std::filesystem::exists(p)) {
    std::vector<std::string> order;
    const auto cols = read_csv_columns(p, order);
    require(cols, {"t", "charge", "gauss_residual", "lorenz_residual", "D_T", "tildeD_T"}, p);
    write_long(dir / "plot_diagnostics.csv", cols, "t", {"charge", "gauss_residual", "lorenz_residual"});
    write_long(dir / "plot_norms.csv", cols, "t", {"D_T", "tildeD_T"});
    written += 2;
  }
  if (const auto p = dir / "schedule.csv"; std::filesystem::exists(p)) {
    std::vector<std::string> order;
    const auto cols = read_csv_columns(p, order);
    require(cols, {"S_j", "T_j", "Delta_j", "Dtilde_start", "Dtilde_end", "C_fit"}, p);
    write_long(dir / "plot_schedule.csv", cols, "S_j", {"T_j", "Delta_j", "Dtilde_start", "Dtilde_end", "C_fit"});
    ++written;
  }
  if (written == 0) throw IoError("no diagnostics.csv or schedule.csv in " + run_dir);
  log << "plotdata: " << written << " files in " << run_dir << '\n';
  return ok;
}

}  // namespace md2d::app
