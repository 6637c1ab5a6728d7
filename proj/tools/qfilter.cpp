// qfilter: command-line driver for the weak-measurement experiments.
//
//   qfilter <trajectory|ensemble|sweep|goalprog|discord> [options]
//
// Settings resolve as defaults < --config file < QFILTER_SEED/QFILTER_OUT < flags.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 1 other.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "qfilter/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qfilter::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous weak measurement of a double-dot qubit: trajectories, filters and scenario sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool fast = false;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> kappa;
  std::optional<double> periods;
  std::optional<std::int64_t> realizations;
  bool compare_me2 = false;

  app.add_option("--config", config_path, "Experiment configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output directory");
  app.add_flag("--fast", fast, "10000 steps per Rabi period instead of 150000");
  app.add_option("--workers", workers, "Maximum worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--kappa", kappa, "Measurement strength in units of Omega");
  app.add_option("--periods", periods, "Horizon in Rabi periods");
  app.add_option("--realizations", realizations, "Ensemble size");
  app.add_flag("--compare-me2", compare_me2, "Add the deterministic ensemble-filter populations");

  auto* trajectory = app.add_subcommand("trajectory", "Single SME realization with its filter");
  auto* ensemble = app.add_subcommand("ensemble", "Averages over independent realizations");
  auto* sweep = app.add_subcommand("sweep", "C, B and E surfaces over (t, kappa)");
  auto* goalprog = app.add_subcommand("goalprog", "Goal-programming objective maps");
  auto* discord = app.add_subcommand("discord", "Projective confidence against the discord bound");
  for (auto* sub : {trajectory, ensemble, sweep, goalprog, discord}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    qfilter::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = qfilter::parse_config(read_file(config_path));
    qfilter::apply_environment(cfg);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (fast) cfg.steps_per_period = qfilter::kFastStepsPerPeriod;
    if (kappa) cfg.kappa = *kappa;
    if (periods) cfg.periods = *periods;
    if (realizations) cfg.realizations = *realizations;
    if (compare_me2) cfg.compare_me2 = true;
    cfg.validate();

    qfilter::Paths written;
    if (*trajectory) written = qfilter::cmd_trajectory(cfg);
    if (*ensemble) written = qfilter::cmd_ensemble(cfg, workers);
    if (*sweep) written = qfilter::cmd_sweep(cfg, workers);
    if (*goalprog) written = qfilter::cmd_goalprog(cfg, workers);
    if (*discord) written = qfilter::cmd_discord(cfg);
    for (const auto& p : written) std::cout << p.string() << '\n';
    return 0;
  } catch (const qfilter::ConfigError& e) {
    std::cerr << "qfilter: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const qfilter::NumericalError& e) {
    std::cerr << "qfilter: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qfilter: " << e.what() << '\n';
    return 1;
  }
}
