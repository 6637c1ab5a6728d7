#pragma once

// Goal programming over measurement scenarios (t, kappa).
//
//   minimize  O = eta1 d1+ + eta2 d2+
//   s.t.      C(x) - d1+ + d1- = Delta_C
//             B(x) - d2+ + d2- = Delta_B,   d1,2 +- >= 0
//
// C and B are the relative-entropy confidence and backaction obtained from
// the ensemble filter co-integrated with the Lindblad state. The problem
// separates per grid cell, so evaluating O on the (t, kappa) grid solves it.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "qfilter/dynamics.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/metrics.hpp"

namespace qfilter {

struct Deviation {
  double plus = 0.0;
  double minus = 0.0;
};

// d+ = max(value - target, 0), d- = max(target - value, 0).
inline Deviation deviations(double value, double target) {
  if (value > target) return {value - target, 0.0};
  return {0.0, target - value};
}

struct GoalConfig {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double delta_c = 0.1;
  double delta_b = 0.1;
  std::vector<double> t_grid;      // Rabi periods
  std::vector<double> kappa_grid;  // units of Omega

  void validate() const {
    if (!(eta1 > 0.0 && eta2 > 0.0)) throw ConfigError("goal weights must be positive");
    if (!(delta_c > 0.0 && delta_b > 0.0)) throw ConfigError("goal tolerances must be positive");
    auto increasing = [](const std::vector<double>& g) {
      if (g.empty()) return false;
      for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
      return true;
    };
    if (!increasing(t_grid)) throw ConfigError("t grid must be nonempty and strictly increasing");
    if (!increasing(kappa_grid)) throw ConfigError("kappa grid must be nonempty and strictly increasing");
    if (t_grid.front() < 0.0) throw ConfigError("t grid must be non-negative");
    if (!(kappa_grid.front() > 0.0)) throw ConfigError("kappa grid must be positive");
  }
};

inline double objective(double c, double b, const GoalConfig& g) {
  return g.eta1 * deviations(c, g.delta_c).plus + g.eta2 * deviations(b, g.delta_b).plus;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Row-major [kappa index][t index] grid.
struct Grid {
  std::size_t n_t = 0;
  std::size_t n_kappa = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(std::size_t nt, std::size_t nk, double fill = 0.0) : n_t(nt), n_kappa(nk), v(nt * nk, fill) {}
  double& at(std::size_t it, std::size_t ik) { return v[ik * n_t + it]; }
  double at(std::size_t it, std::size_t ik) const { return v[ik * n_t + it]; }
};

// Relative-entropy C, B and E of the ensemble filter on a (t, kappa) grid.
struct MeasurementSurface {
  std::vector<double> t_grid;      // Rabi periods
  std::vector<double> kappa_grid;  // units of Omega
  Grid c_re, b_re, e_re;
};

// One deterministic co-integration per kappa column; columns run on up to
// `workers` threads and are stored by index.
inline MeasurementSurface measurement_surface(const SimConfig& base, const std::vector<double>& t_grid,
                                              const std::vector<double>& kappa_grid, unsigned workers = 1) {
  MeasurementSurface s;
  s.t_grid = t_grid;
  s.kappa_grid = kappa_grid;
  const std::size_t nt = t_grid.size();
  const std::size_t nk = kappa_grid.size();
  s.c_re = Grid(nt, nk);
  s.b_re = Grid(nt, nk);
  s.e_re = Grid(nt, nk);
  const double period = rabi_period(base.omega);
  std::vector<double> times(nt);
  for (std::size_t i = 0; i < nt; ++i) times[i] = t_grid[i] * period;

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::size_t error_column = nk;

  auto work = [&] {
    for (;;) {
      const std::size_t ik = next.fetch_add(1);
      if (ik >= nk) return;
      try {
        SimConfig cfg = base;
        cfg.kappa = kappa_grid[ik];
        cfg.n_steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(times.back() / cfg.dt)));
        cfg.output_points = 2;
        const auto series = run_ensemble_filter(cfg, states::left(), Qubit::maximally_mixed(), times);
        for (std::size_t it = 0; it < nt; ++it) {
          s.c_re.at(it, ik) = confidence(series.rho_e[it], series.rho_r[it], Measure::RelativeEntropy);
          s.b_re.at(it, ik) = backaction(series.rho_i[it], series.rho_r[it], Measure::RelativeEntropy);
          s.e_re.at(it, ik) = epitome(series.rho_i[it], series.rho_e[it], Measure::RelativeEntropy);
        }
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (ik < error_column) {
          error_column = ik;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(nk)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return s;
}

struct Cell {
  std::size_t it = 0;
  std::size_t ik = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GoalResult {
  std::vector<double> t_grid;
  std::vector<double> kappa_grid;
  Grid objective, d1_plus, d1_minus, d2_plus, d2_minus;
  std::vector<Cell> best;  // cells with O == 0, ordered by (kappa, t)
};

inline GoalResult evaluate_goals(const MeasurementSurface& s, const GoalConfig& g) {
  const std::size_t nt = s.t_grid.size();
  const std::size_t nk = s.kappa_grid.size();
  GoalResult r;
  r.t_grid = s.t_grid;
  r.kappa_grid = s.kappa_grid;
  r.objective = Grid(nt, nk);
  r.d1_plus = Grid(nt, nk);
  r.d1_minus = Grid(nt, nk);
  r.d2_plus = Grid(nt, nk);
  r.d2_minus = Grid(nt, nk);
  for (std::size_t ik = 0; ik < nk; ++ik) {
    for (std::size_t it = 0; it < nt; ++it) {
      const double c = s.c_re.at(it, ik);
      const double b = s.b_re.at(it, ik);
      const Deviation d1 = deviations(c, g.delta_c);
      const Deviation d2 = deviations(b, g.delta_b);
      r.d1_plus.at(it, ik) = d1.plus;
      r.d1_minus.at(it, ik) = d1.minus;
      r.d2_plus.at(it, ik) = d2.plus;
      r.d2_minus.at(it, ik) = d2.minus;
      const double o = g.eta1 * d1.plus + g.eta2 * d2.plus;
      r.objective.at(it, ik) = o;
      if (o == 0.0) r.best.push_back({it, ik});
    }
  }
  return r;
}

inline GoalResult sweep(const GoalConfig& g, const SimConfig& base, unsigned workers = 1) {
  g.validate();
  return evaluate_goals(measurement_surface(base, g.t_grid, g.kappa_grid, workers), g);
}

// Cells attaining the minimum objective (the whole best set when it is
// nonempty).
inline std::vector<Cell> argmin_cells(const GoalResult& r) {
  const double lo = *std::min_element(r.objective.v.begin(), r.objective.v.end());
  std::vector<Cell> out;
  for (std::size_t ik = 0; ik < r.kappa_grid.size(); ++ik)
    for (std::size_t it = 0; it < r.t_grid.size(); ++it)
      if (r.objective.at(it, ik) == lo) out.push_back({it, ik});
  return out;
}

// First time at which C - B changes sign from positive to non-positive,
// linearly interpolated between grid samples. Values in the same units as t.
inline std::optional<double> crossing_time(const std::vector<double>& t, const std::vector<double>& c,
                                           const std::vector<double>& b) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double d0 = c[i - 1] - b[i - 1];
    const double d1 = c[i] - b[i];
    if (d0 > 0.0 && d1 <= 0.0) {
      const double w = d0 / (d0 - d1);
      return t[i - 1] + w * (t[i] - t[i - 1]);
    }
  }
  return std::nullopt;
}

// Time of the smallest value; ties resolve toward the earlier time.
inline double argmin_time(const std::vector<double>& t, const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return t[best];
}

inline std::vector<double> column(const Grid& g, std::size_t ik) {
  return {g.v.begin() + static_cast<std::ptrdiff_t>(ik * g.n_t),
          g.v.begin() + static_cast<std::ptrdiff_t>((ik + 1) * g.n_t)};
}

// Per-kappa crossing of C and B together with the epitome minimum.
struct CrossingPoint {
  double kappa = 0.0;
  std::optional<double> t_cross;  // Rabi periods
  double t_min_epitome = 0.0;     // Rabi periods
};

inline std::vector<CrossingPoint> crossing_locus(const MeasurementSurface& s) {
  std::vector<CrossingPoint> out;
  for (std::size_t ik = 0; ik < s.kappa_grid.size(); ++ik) {
    CrossingPoint p;
    p.kappa = s.kappa_grid[ik];
    p.t_cross = crossing_time(s.t_grid, column(s.c_re, ik), column(s.b_re, ik));
    p.t_min_epitome = argmin_time(s.t_grid, column(s.e_re, ik));
    out.push_back(p);
  }
  return out;
}

// Default scenario grid: t in [0, 15] Rabi periods, kappa in [5e-4, 2e-2] Omega.
inline GoalConfig default_goal_config(std::size_t n_t = 100, std::size_t n_kappa = 100) {
  GoalConfig g;
  g.t_grid = linspace(0.0, 15.0, n_t);
  g.kappa_grid = linspace(0.0005, 0.02, n_kappa);
  return g;
}

}  // namespace qfilter
