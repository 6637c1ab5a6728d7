#pragma once

// The experiment drivers behind the qfilter command-line tool. Each command
// reads an ExperimentConfig, writes CSV/JSON files under cfg.out and returns
// their paths. Outputs depend only on the config; `workers` changes speed only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfilter/config.hpp"
#include "qfilter/csv.hpp"
#include "qfilter/discord.hpp"
#include "qfilter/dynamics.hpp"
#include "qfilter/ensemble.hpp"
#include "qfilter/goalprog.hpp"
#include "qfilter/metrics.hpp"
#include "qfilter/qstate.hpp"

namespace qfilter {

using Paths = std::vector<std::filesystem::path>;

inline std::string provenance(const ExperimentConfig& cfg, std::string_view command) {
  return "qfilter " + std::string(kVersion) + " format=" + std::to_string(cfg.format_version) +
         " command=" + std::string(command) + " config=" + hash_hex(config_hash(cfg)) +
         " seed=" + std::to_string(cfg.seed);
}

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> c = {"t",     "P_L_real",        "P_L_est",         "P_L_ideal",
                                             "C_fid", "B_fid",           "one_minus_C_fid", "one_minus_B_fid",
                                             "C_re",  "B_re",            "E_re"};
  return c;
}

inline Paths cmd_trajectory(const ExperimentConfig& cfg) {
  cfg.validate();
  const SimConfig sim = cfg.sim();
  const TrajectoryRecord rec = run_trajectory(sim, states::left(), Qubit::maximally_mixed());
  const MetricSeries m = compute_metrics(rec);

  const auto path = std::filesystem::path(cfg.out) / "trajectory.csv";
  CsvWriter w(path, provenance(cfg, "trajectory"), trajectory_columns());
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    w.row(std::vector<double>{rec.times[k], population_left(rec.rho_r[k]), population_left(rec.rho_e[k]),
                              population_left(rec.rho_i[k]), m.c_fid[k], m.b_fid[k], 1.0 - m.c_fid[k],
                              1.0 - m.b_fid[k], m.c_re[k], m.b_re[k], m.e_re[k]});
  }
  w.close();
  return {path};
}

// Trajectory columns (means over realizations), their standard errors, the
// metrics of the averaged states (_mom) and optionally the deterministic
// ensemble-filter populations.
inline Paths cmd_ensemble(const ExperimentConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  const SimConfig sim = cfg.sim();
  const EnsembleResult r = run_ensemble(sim, cfg.realizations, states::left(), Qubit::maximally_mixed(), workers);
  const AveragedMetrics a = averaged_metrics(r);

  std::vector<std::string> cols = trajectory_columns();
  for (const char* c : {"P_L_real_stderr", "P_L_est_stderr", "C_fid_stderr", "B_fid_stderr", "C_re_stderr",
                        "B_re_stderr", "E_re_stderr", "C_fid_mom", "B_fid_mom", "C_re_mom", "B_re_mom", "E_re_mom"})
    cols.emplace_back(c);
  EnsembleFilterSeries me2;
  if (cfg.compare_me2) {
    me2 = run_ensemble_filter(sim, states::left(), Qubit::maximally_mixed());
    cols.emplace_back("P_L_me2");
    cols.emplace_back("P_L_lindblad");
  }

  const auto path = std::filesystem::path(cfg.out) / "ensemble.csv";
  CsvWriter w(path, provenance(cfg, "ensemble"), cols);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    std::vector<double> row = {r.times[k],
                               r.p_l_real.mean[k],
                               r.p_l_est.mean[k],
                               population_left(r.rho_i[k]),
                               r.c_fid.mean[k],
                               r.b_fid.mean[k],
                               1.0 - r.c_fid.mean[k],
                               1.0 - r.b_fid.mean[k],
                               r.c_re.mean[k],
                               r.b_re.mean[k],
                               r.e_re.mean[k],
                               r.p_l_real.stderr_[k],
                               r.p_l_est.stderr_[k],
                               r.c_fid.stderr_[k],
                               r.b_fid.stderr_[k],
                               r.c_re.stderr_[k],
                               r.b_re.stderr_[k],
                               r.e_re.stderr_[k],
                               a.of_mean.c_fid[k],
                               a.of_mean.b_fid[k],
                               a.of_mean.c_re[k],
                               a.of_mean.b_re[k],
                               a.of_mean.e_re[k]};
    if (cfg.compare_me2) {
      row.push_back(population_left(me2.rho_e[k]));
      row.push_back(population_left(me2.rho_r[k]));
    }
    w.row(row);
  }
  w.close();
  return {path};
}

// Template for the deterministic (t, kappa) surfaces: the time step of the
// configured steps_per_period, other parameters from [sim].
inline SimConfig surface_template(const ExperimentConfig& cfg) {
  SimConfig base = cfg.sim();
  base.seed = cfg.seed;
  return base;
}

inline MeasurementSurface configured_surface(const ExperimentConfig& cfg, unsigned workers) {
  return measurement_surface(surface_template(cfg), cfg.sweep_t_grid(), cfg.sweep_kappa_grid(), workers);
}

inline Paths cmd_sweep(const ExperimentConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  const MeasurementSurface s = configured_surface(cfg, workers);
  const auto dir = std::filesystem::path(cfg.out);

  const auto grid_path = dir / "sweep.csv";
  CsvWriter g(grid_path, provenance(cfg, "sweep"), {"t_periods", "kappa", "C_re", "B_re", "E_re"});
  for (std::size_t ik = 0; ik < s.kappa_grid.size(); ++ik)
    for (std::size_t it = 0; it < s.t_grid.size(); ++it)
      g.row(std::vector<double>{s.t_grid[it], s.kappa_grid[ik], s.c_re.at(it, ik), s.b_re.at(it, ik),
                                s.e_re.at(it, ik)});
  g.close();

  const auto locus_path = dir / "sweep_crossing.csv";
  CsvWriter l(locus_path, provenance(cfg, "sweep"), {"kappa", "t_cross", "t_min_epitome"});
  for (const auto& p : crossing_locus(s))
    l.row(std::vector<double>{p.kappa, p.t_cross.value_or(std::nan("")), p.t_min_epitome});
  l.close();
  return {grid_path, locus_path};
}

struct GoalSet {
  std::string label;
  double eta1, eta2, delta_c, delta_b;
};

inline std::vector<GoalSet> goal_sets(const ExperimentConfig& cfg) {
  if (cfg.goal_sets == "single") return {{"single", cfg.eta1, cfg.eta2, cfg.delta_c, cfg.delta_b}};
  return {{"a", 1.0, 1.0, 0.1, 0.1}, {"b", 1.0, 1.0, 0.2, 0.2}, {"c", 1.0, 0.5, 0.1, 0.1}, {"d", 0.5, 1.0, 0.1, 0.1}};
}

inline Paths cmd_goalprog(const ExperimentConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  const MeasurementSurface s = configured_surface(cfg, workers);
  const auto dir = std::filesystem::path(cfg.out);
  Paths written;
  nlohmann::ordered_json summary;
  summary["version"] = kVersion;
  summary["config"] = hash_hex(config_hash(cfg));
  summary["seed"] = cfg.seed;
  summary["sets"] = nlohmann::ordered_json::array();

  for (const GoalSet& set : goal_sets(cfg)) {
    GoalConfig g;
    g.eta1 = set.eta1;
    g.eta2 = set.eta2;
    g.delta_c = set.delta_c;
    g.delta_b = set.delta_b;
    g.t_grid = s.t_grid;
    g.kappa_grid = s.kappa_grid;
    g.validate();
    const GoalResult r = evaluate_goals(s, g);

    const auto path = dir / ("goalprog_" + set.label + ".csv");
    CsvWriter w(path, provenance(cfg, "goalprog"), {"t_periods", "kappa", "O", "d1p", "d1m", "d2p", "d2m"});
    for (std::size_t ik = 0; ik < r.kappa_grid.size(); ++ik)
      for (std::size_t it = 0; it < r.t_grid.size(); ++it)
        w.row(std::vector<double>{r.t_grid[it], r.kappa_grid[ik], r.objective.at(it, ik), r.d1_plus.at(it, ik),
                                  r.d1_minus.at(it, ik), r.d2_plus.at(it, ik), r.d2_minus.at(it, ik)});
    w.close();
    written.push_back(path);

    nlohmann::ordered_json entry;
    entry["label"] = set.label;
    entry["eta1"] = set.eta1;
    entry["eta2"] = set.eta2;
    entry["delta_c"] = set.delta_c;
    entry["delta_b"] = set.delta_b;
    entry["min_objective"] = *std::min_element(r.objective.v.begin(), r.objective.v.end());
    entry["best_count"] = r.best.size();
    if (r.best.empty()) {
      entry["best_box"] = nullptr;
    } else {
      double t_lo = r.t_grid[r.best.front().it], t_hi = t_lo;
      double k_lo = r.kappa_grid[r.best.front().ik], k_hi = k_lo;
      for (const Cell& c : r.best) {
        t_lo = std::min(t_lo, r.t_grid[c.it]);
        t_hi = std::max(t_hi, r.t_grid[c.it]);
        k_lo = std::min(k_lo, r.kappa_grid[c.ik]);
        k_hi = std::max(k_hi, r.kappa_grid[c.ik]);
      }
      entry["best_box"] = {{"t_min", t_lo}, {"t_max", t_hi}, {"kappa_min", k_lo}, {"kappa_max", k_hi}};
    }
    summary["sets"].push_back(entry);
  }

  const auto json_path = dir / "goalprog_summary.json";
  std::ofstream js(json_path, std::ios::binary | std::ios::trunc);
  if (!js) throw IoError("cannot open " + json_path.string() + " for writing");
  js << summary.dump(2) << '\n';
  js.close();
  if (!js) throw IoError("failed writing " + json_path.string());
  written.push_back(json_path);
  return written;
}

// Basis drawn uniformly on the Bloch sphere.
inline ApparatusBasis random_basis(StateSampler& rng) {
  const double theta = std::acos(std::clamp(1.0 - 2.0 * rng.uniform(), -1.0, 1.0));
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  return {theta, phi};
}

// Rows: random Wishart states against random bases, then the Bell state and
// random product states at their minimizing bases. margin = C - D.
inline Paths cmd_discord(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto path = std::filesystem::path(cfg.out) / "discord.csv";
  CsvWriter w(path, provenance(cfg, "discord"),
              {"state_id", "kind", "basis_id", "theta", "phi", "C", "D", "margin"});
  StateSampler states_rng(cfg.seed, 0);
  StateSampler bases_rng(cfg.seed, 1);
  const int resolution = static_cast<int>(cfg.discord_resolution);
  auto emit = [&](std::int64_t id, const char* kind, std::int64_t basis_id, const ApparatusBasis& b, double c,
                  double d) {
    w.row(std::vector<std::string>{std::to_string(id), kind, std::to_string(basis_id), format_value(b.theta),
                                   format_value(b.phi), format_value(c), format_value(d), format_value(c - d)});
  };

  for (std::int64_t i = 0; i < cfg.discord_states; ++i) {
    const TwoQubit rho = states_rng.wishart<4>();
    const DiscordResult d = discord_lower_bound(rho, resolution);
    for (std::int64_t j = 0; j < cfg.discord_bases; ++j) {
      const ApparatusBasis b = random_basis(bases_rng);
      emit(i, "random", j, b, povm_confidence(rho, b), d.value);
    }
  }
  {
    const TwoQubit bell = states::bell_phi_plus();
    const DiscordResult d = discord_lower_bound(bell, resolution);
    emit(0, "bell", 0, d.basis, povm_confidence(bell, d.basis), d.value);
  }
  for (std::int64_t i = 0; i < 10; ++i) {
    const TwoQubit prod = states::product(states_rng.bloch_ball(), states_rng.bloch_ball());
    const DiscordResult d = discord_lower_bound(prod, resolution);
    emit(i, "product", 0, d.basis, povm_confidence(prod, d.basis), d.value);
  }
  w.close();
  return {path};
}

}  // namespace qfilter
