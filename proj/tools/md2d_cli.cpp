#include <CLI11.hpp>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>
#include <sstream>

#include "md2d/app.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> lemmas;
  std::optional<double> epsilon, tmax;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "verifier seed (overrides config)");
  cmd->add_option("--out", o.out, "output directory (overrides config)");
  cmd->add_option("--lemma", o.lemmas, "lemma to verify; repeatable (overrides config)");
  cmd->add_option("--epsilon", o.epsilon, "smallness parameter (overrides config)");
  cmd->add_option("--tmax", o.tmax, "scheduler end time (overrides config)");
}

md2d::AppConfig resolve(const Overrides& o) {
  md2d::AppConfig c = o.config.empty() ? md2d::AppConfig{} : md2d::load_config(o.config);
  if (o.seed) c.verifier.seed = *o.seed;
  if (o.out) c.output.directory = *o.out;
  if (!o.lemmas.empty()) c.verifier.lemmas = o.lemmas;
  if (o.epsilon) {
    if (!(*o.epsilon > 0.0 && *o.epsilon <= 1.0)) throw md2d::ConfigError("--epsilon must lie in (0, 1]");
    c.physics.epsilon = *o.epsilon;
  }
  if (o.tmax) {
    if (!(*o.tmax > 0.0)) throw md2d::ConfigError("--tmax must be positive");
    c.scheduler.t_max = *o.tmax;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"md2d: Maxwell-Dirac pseudospectral simulation and lemma verification"};
  app.require_subcommand(1);
  Overrides o;
  std::string run_dir;
  auto* sim = app.add_subcommand("simulate", "evolve the configured data and write diagnostics.csv");
  auto* sch = app.add_subcommand("schedule", "run the staged global schedule and write schedule.csv");
  auto* ver = app.add_subcommand("verify", "run lemma checks, write evidence CSVs and summary.json");
  auto* plt = app.add_subcommand("plotdata", "convert run outputs to long-format CSVs");
  for (auto* c : {sim, sch, ver}) add_common(c, o);
  plt->add_option("run_dir", run_dir, "directory of a previous simulate or schedule run");
  plt->add_option("--out", o.out, "run directory (alternative to the positional argument)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return md2d::app::config_error;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(std::cerr);
  auto logger = std::make_shared<spdlog::logger>("md2d", sink);
  // Forwards each completed line to the logger.
  struct LogStream : std::streambuf {
    std::shared_ptr<spdlog::logger> l;
    std::string line;
    int overflow(int ch) override {
      if (ch == '\n') {
        l->info(line);
        line.clear();
      } else if (ch != traits_type::eof()) {
        line.push_back(static_cast<char>(ch));
      }
      return ch;
    }
  } lsb;
  lsb.l = logger;
  std::ostream log(&lsb);

  return md2d::app::guarded(
      [&] {
        if (*plt) {
          const std::string dir = !run_dir.empty() ? run_dir : o.out.value_or("");
          if (dir.empty()) throw md2d::ConfigError("plotdata needs a run directory");
          return md2d::app::cmd_plotdata(dir, log);
        }
        const md2d::AppConfig c = resolve(o);
        if (*sim) return md2d::app::cmd_simulate(c, log);
        if (*sch) return md2d::app::cmd_schedule(c, log);
        return md2d::app::cmd_verify(c, log);
      },
      std::cerr);
}
