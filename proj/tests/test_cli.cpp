#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "md2d/app.hpp"

namespace fs = std::filesystem;
using namespace md2d;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("md2d_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string l;
  std::getline(is, l);
  return l;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MD2D_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

AppConfig zero_config(const fs::path& out) {
  AppConfig c;
  c.grid.n = 16;
  c.data.psi.amplitude = 0.0;
  c.data.E.amplitude = 0.0;
  c.data.B.amplitude = 0.0;
  c.integrator.dt = 1.0 / 64;
  c.integrator.T = 1.0 / 8;
  c.scheduler.t_max = 0.05;
  c.output.directory = out.string();
  return c;
}

}  // namespace

TEST(Cli, SimulateZeroDataStaysZero) {
  const auto dir = fresh_dir("zero");
  std::ostringstream log;
  ASSERT_EQ(app::cmd_simulate(zero_config(dir), log), app::ok);
  ASSERT_EQ(first_line(dir / "diagnostics.csv"), app::kDiagnosticsHeader);
  std::ifstream is(dir / "diagnostics.csv");
  std::string line;
  std::getline(is, line);
  int rows = 0;
  double prev_t = -1.0;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 6u);
    EXPECT_GT(v[0], prev_t);
    prev_t = v[0];
    for (std::size_t k = 1; k < v.size(); ++k) EXPECT_EQ(v[k], 0.0) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 9);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  const auto cfg = parse_config(slurp(dir / "config.json"));
  EXPECT_EQ(cfg.grid.n, 16);
}

TEST(Cli, SimulateDumpWritesSpinorFiles) {
  const auto dir = fresh_dir("dump");
  AppConfig c = zero_config(dir);
  c.data.psi.amplitude = 0.1;
  c.output.formats = {"csv", "dump"};
  std::ostringstream log;
  ASSERT_EQ(app::cmd_simulate(c, log), app::ok);
  EXPECT_TRUE(fs::exists(dir / "psi1_final.bin"));
  EXPECT_TRUE(fs::exists(dir / "psi2_final.bin"));
}

TEST(Cli, ScheduleZeroDataSingleStage) {
  const auto dir = fresh_dir("sched");
  std::ostringstream log;
  ASSERT_EQ(app::cmd_schedule(zero_config(dir), log), app::ok);
  EXPECT_EQ(first_line(dir / "schedule.csv"), app::kScheduleHeader);
  std::ifstream is(dir / "schedule.csv");
  std::string line;
  int rows = 0;
  std::getline(is, line);
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 1);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(j["run"]["reached_t_max"].get<bool>());
}

TEST(Cli, EpsilonSweepWritesOneRowPerValue) {
  const auto dir = fresh_dir("sweep");
  AppConfig c = zero_config(dir);
  c.data.psi.amplitude = 0.1;
  c.scheduler.epsilon_sweep = {0.2, 0.1};
  std::ostringstream log;
  ASSERT_EQ(app::cmd_schedule(c, log), app::ok);
  std::ifstream is(dir / "epsilon_sweep.csv");
  std::string line;
  int rows = 0;
  std::getline(is, line);
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Cli, VerifySingleLemmaWritesOnlyItsEvidence) {
  const auto dir = fresh_dir("verify1");
  AppConfig c;
  c.verifier.lemmas = {"HyperLemma"};
  c.verifier.trials = 1000;
  c.output.directory = dir.string();
  std::ostringstream log;
  ASSERT_EQ(app::cmd_verify(c, log), app::ok);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"HyperLemma.csv", "summary.json"}));
  EXPECT_EQ(first_line(dir / "HyperLemma.csv"), verify::kEvidenceHeader);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  ASSERT_EQ(j["lemmas"].size(), 1u);
  EXPECT_TRUE(j["lemmas"][0]["pass"].get<bool>());
}

TEST(Cli, VerifyForcedFailureExitsFour) {
  const auto dir = fresh_dir("forced");
  AppConfig c;
  c.verifier.lemmas = {"HyperLemma"};
  c.verifier.trials = 1000;
  c.verifier.constant_scale = 0.5;
  c.output.directory = dir.string();
  std::ostringstream log;
  EXPECT_EQ(app::cmd_verify(c, log), app::lemma_failure);
  EXPECT_TRUE(fs::exists(dir / "HyperLemma_failures.csv"));
  EXPECT_EQ(first_line(dir / "HyperLemma_failures.csv"), verify::kEvidenceHeader);
}

TEST(Cli, PlotdataIsIdempotent) {
  const auto dir = fresh_dir("plot");
  AppConfig c = zero_config(dir);
  c.data.psi.amplitude = 0.1;
  std::ostringstream log;
  ASSERT_EQ(app::cmd_simulate(c, log), app::ok);
  ASSERT_EQ(app::cmd_schedule(c, log), app::ok);
  ASSERT_EQ(app::cmd_plotdata(dir.string(), log), app::ok);
  const std::string a = slurp(dir / "plot_diagnostics.csv"), b = slurp(dir / "plot_norms.csv"),
                    s = slurp(dir / "plot_schedule.csv");
  ASSERT_EQ(app::cmd_plotdata(dir.string(), log), app::ok);
  EXPECT_EQ(a, slurp(dir / "plot_diagnostics.csv"));
  EXPECT_EQ(b, slurp(dir / "plot_norms.csv"));
  EXPECT_EQ(s, slurp(dir / "plot_schedule.csv"));
  for (const char* f : {"plot_diagnostics.csv", "plot_norms.csv", "plot_schedule.csv"})
    EXPECT_EQ(first_line(dir / f), app::kPlotHeader);
  EXPECT_NE(a.find("\ncharge,"), std::string::npos);
  EXPECT_NE(b.find("\ntildeD_T,"), std::string::npos);
}

TEST(Cli, PlotdataMissingArtifactsIsIoError) {
  const auto dir = fresh_dir("empty");
  fs::create_directories(dir);
  std::ostringstream err;
  EXPECT_EQ(app::guarded([&] { return app::cmd_plotdata(dir.string(), err); }, err), app::io_error);
  EXPECT_EQ(app::guarded([&] { return app::cmd_plotdata((dir / "nope").string(), err); }, err), app::io_error);
}

TEST(Cli, BinaryExitCodes) {
  const auto dir = fresh_dir("bin");
  fs::create_directories(dir);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{ \"grid\": { \"n\": 64 ";
  EXPECT_EQ(run_cli("simulate --config " + bad.string()), app::config_error);
  std::ofstream(dir / "unknown.json") << R"({"grid": {"size": 64}})";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "unknown.json").string()), app::config_error);
  EXPECT_EQ(run_cli("verify --lemma NoSuchLemma --out " + (dir / "v").string()), app::config_error);
  EXPECT_EQ(run_cli("frobnicate"), app::config_error);
  EXPECT_EQ(run_cli("plotdata " + (dir / "missing").string()), app::io_error);
  std::ofstream(dir / "ff.json") << R"({"verifier": {"lemmas": ["HyperLemma"], "trials": 1000, "constant_scale": 0.5}})";
  EXPECT_EQ(run_cli("verify --config " + (dir / "ff.json").string() + " --out " + (dir / "ff").string()),
            app::lemma_failure);
  EXPECT_EQ(run_cli("verify --lemma SigmaTrilinear --seed 3 --out " + (dir / "ok").string()), app::ok);
}
