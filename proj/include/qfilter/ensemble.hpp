#pragma once

// Monte Carlo ensembles of filtered trajectories.
//
// Trajectory j draws its noise from stream j of the master seed, and the
// trajectories are reduced in fixed blocks that are merged in index order,
// so results are bitwise identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "qfilter/dynamics.hpp"
#include "qfilter/metrics.hpp"
#include "qfilter/qstate.hpp"

namespace qfilter {

// Mean and standard error of a per-output quantity. A point is +inf when any
// realization was infinite there.
struct SeriesStat {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct EnsembleResult {
  std::int64_t n_realizations = 0;
  std::vector<double> times;
  std::vector<Qubit> mean_rho_r;
  std::vector<Qubit> mean_rho_e;
  std::vector<Qubit> rho_i;
  // Mean over realizations of each per-trajectory metric.
  SeriesStat c_fid, b_fid, e_fid, c_re, b_re, e_re;
  SeriesStat p_l_real, p_l_est;
  // Bloch components of rho_R, for consistency checks against the Lindblad state.
  SeriesStat bloch_x, bloch_y, bloch_z;
};

namespace detail {

inline constexpr std::int64_t kBlockSize = 32;
inline constexpr std::size_t kQuantities = 11;  // 6 metrics, 2 populations, 3 Bloch components

struct Accumulator {
  std::vector<Matrix<2>> sum_r, sum_e;
  std::vector<double> sum, sum_sq;   // [quantity * n_out + k]
  std::vector<std::int64_t> n_inf;

  explicit Accumulator(std::size_t n_out)
      : sum_r(n_out), sum_e(n_out), sum(kQuantities * n_out), sum_sq(kQuantities * n_out), n_inf(kQuantities * n_out) {}

  void add(std::size_t q, std::size_t k, std::size_t n_out, double v) {
    const std::size_t i = q * n_out + k;
    if (std::isinf(v)) {
      ++n_inf[i];
      return;
    }
    sum[i] += v;
    sum_sq[i] += v * v;
  }

  void merge(const Accumulator& o) {
    for (std::size_t k = 0; k < sum_r.size(); ++k) {
      sum_r[k] += o.sum_r[k];
      sum_e[k] += o.sum_e[k];
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
      n_inf[i] += o.n_inf[i];
    }
  }
};

inline void accumulate(Accumulator& acc, const TrajectoryRecord& rec) {
  const std::size_t n_out = rec.times.size();
  for (std::size_t k = 0; k < n_out; ++k) {
    acc.sum_r[k] += rec.rho_r[k].matrix();
    acc.sum_e[k] += rec.rho_e[k].matrix();
    const MetricPoint m = evaluate_metrics(rec.rho_i[k], rec.rho_r[k], rec.rho_e[k]);
    const BlochVector b = BlochVector::of(rec.rho_r[k]);
    const double values[kQuantities] = {m.c_fid,
                                        m.b_fid,
                                        m.e_fid,
                                        m.c_re,
                                        m.b_re,
                                        m.e_re,
                                        population_left(rec.rho_r[k]),
                                        population_left(rec.rho_e[k]),
                                        b.x,
                                        b.y,
                                        b.z};
    for (std::size_t q = 0; q < kQuantities; ++q) acc.add(q, k, n_out, values[q]);
  }
}

inline SeriesStat finalize(const Accumulator& acc, std::size_t q, std::size_t n_out, std::int64_t n) {
  SeriesStat s;
  s.mean.resize(n_out);
  s.stderr_.resize(n_out);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t i = q * n_out + k;
    if (acc.n_inf[i] > 0) {
      s.mean[k] = kInfinity;
      s.stderr_[k] = kInfinity;
      continue;
    }
    const double mean = acc.sum[i] / dn;
    s.mean[k] = mean;
    if (n > 1) {
      const double var = std::max(0.0, (acc.sum_sq[i] - dn * mean * mean) / (dn - 1.0));
      s.stderr_[k] = std::sqrt(var / dn);
    } else {
      s.stderr_[k] = 0.0;
    }
  }
  return s;
}

}  // namespace detail

// Runs n trajectories of the SME/filter pair and reduces them. `workers`
// caps the thread count and never changes the result.
inline EnsembleResult run_ensemble(const SimConfig& cfg, std::int64_t n, const Qubit& rho0_r, const Qubit& rho0_e,
                                   unsigned workers = 1) {
  cfg.validate();
  if (n < 1) throw ConfigError("ensemble size must be at least 1");
  const auto n_out = static_cast<std::size_t>(cfg.output_points);
  const std::int64_t n_blocks = (n + detail::kBlockSize - 1) / detail::kBlockSize;

  std::vector<detail::Accumulator> partial(static_cast<std::size_t>(n_blocks), detail::Accumulator(n_out));
  std::vector<double> times;
  std::vector<Qubit> rho_i;
  std::mutex first_mutex;

  std::atomic<std::int64_t> next_block{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::int64_t failed_index = std::numeric_limits<std::int64_t>::max();
  std::string failure;

  auto work = [&] {
    for (;;) {
      const std::int64_t b = next_block.fetch_add(1);
      if (b >= n_blocks || failed.load()) return;
      const std::int64_t lo = b * detail::kBlockSize;
      const std::int64_t hi = std::min(n, lo + detail::kBlockSize);
      for (std::int64_t j = lo; j < hi; ++j) {
        try {
          const TrajectoryRecord rec = run_trajectory(cfg, rho0_r, rho0_e, static_cast<std::uint64_t>(j));
          detail::accumulate(partial[static_cast<std::size_t>(b)], rec);
          if (j == 0) {
            std::lock_guard lock(first_mutex);
            times = rec.times;
            rho_i = rec.rho_i;
          }
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mutex);
          if (j < failed_index) {
            failed_index = j;
            failure = e.what();
          }
          failed.store(true);
          return;
        }
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::int64_t>(n_blocks, 1024))));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) {
    std::ostringstream os;
    os << "trajectory " << failed_index << " failed: " << failure;
    throw NumericalError(os.str());
  }

  detail::Accumulator total(n_out);
  for (const auto& p : partial) total.merge(p);

  EnsembleResult r;
  r.n_realizations = n;
  r.times = std::move(times);
  r.rho_i = std::move(rho_i);
  const double inv_n = 1.0 / static_cast<double>(n);
  r.mean_rho_r.reserve(n_out);
  r.mean_rho_e.reserve(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    r.mean_rho_r.push_back(Qubit::normalized(total.sum_r[k] * inv_n));
    r.mean_rho_e.push_back(Qubit::normalized(total.sum_e[k] * inv_n));
  }
  SeriesStat* targets[detail::kQuantities] = {&r.c_fid,    &r.b_fid,   &r.e_fid,   &r.c_re,
                                              &r.b_re,     &r.e_re,    &r.p_l_real, &r.p_l_est,
                                              &r.bloch_x,  &r.bloch_y, &r.bloch_z};
  for (std::size_t q = 0; q < detail::kQuantities; ++q) *targets[q] = detail::finalize(total, q, n_out, n);
  return r;
}

// Both averaging orders: `mean` / `stderr_` average the per-trajectory
// metric values; `of_mean` evaluates the metrics on the averaged states.
struct AveragedMetrics {
  MetricSeries mean;
  MetricSeries stderr_;
  MetricSeries of_mean;
};

inline AveragedMetrics averaged_metrics(const EnsembleResult& r) {
  AveragedMetrics a;
  const std::size_t n = r.times.size();
  a.mean.resize(n);
  a.stderr_.resize(n);
  a.mean.times = r.times;
  a.stderr_.times = r.times;
  const SeriesStat* src[6] = {&r.c_fid, &r.b_fid, &r.e_fid, &r.c_re, &r.b_re, &r.e_re};
  auto mean_cols = a.mean.columns();
  auto err_cols = a.stderr_.columns();
  for (std::size_t q = 0; q < 6; ++q) {
    *mean_cols[q] = src[q]->mean;
    *err_cols[q] = src[q]->stderr_;
  }
  a.of_mean = compute_metrics(r.times, r.rho_i, r.mean_rho_r, r.mean_rho_e);
  return a;
}

}  // namespace qfilter
