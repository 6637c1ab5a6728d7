#pragma once

// Time evolution of the monitored double-dot qubit.
//
//   H = (Omega/2) sigma_x + epsilon sigma_z
//
// Four evolutions share this Hamiltonian:
//   * ideal       rho_I : closed-form unitary rotation
//   * Lindblad    rho   : ensemble average of the selective SME
//   * selective   rho_R : SME driven by a Wiener increment, emitting the record dy
//   * filter      rho_E : the same update driven by the observed record dy
//   * ensemble filter   : deterministic filter forced by <sigma_z> of the Lindblad state
//
// Measurement coefficients for a unit-efficiency sigma_z detector of
// strength kappa:
//   noise gain      sqrt(2 kappa)      (multiplies H[sigma_z] rho dW)
//   record drift    sqrt(8 kappa)      (dy = sqrt(8k) <sigma_z> dt + dW)
//   dephasing       2 kappa D[sigma_z] (the Ito partner of the noise gain)
//
// Stochastic steps use the positivity-preserving Kraus form
//   rho' = U M rho M U^dagger / Tr,  M = (1 + k(dY^2 - 2dt)) I + sqrt(2k) dY sigma_z,
// with dY the record increment, which reproduces the Ito SME to O(dt) and
// maps pure states to pure states. Deterministic equations use RK4.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

#include "qfilter/errors.hpp"
#include "qfilter/linalg.hpp"
#include "qfilter/qstate.hpp"
#include "qfilter/random.hpp"

namespace qfilter {

struct SimConfig {
  double omega = 1.0;    // Rabi amplitude Omega
  double epsilon = 0.0;  // coefficient of sigma_z in H
  double kappa = 0.005;  // measurement strength
  double dt = 2.0 * std::numbers::pi / 10000.0;
  std::int64_t n_steps = 150000;
  std::int64_t output_points = 1000;  // samples on [0, n_steps*dt], both ends included
  std::uint64_t seed = 20120607;

  static constexpr double kMaxOmegaDt = 0.01;

  double horizon() const { return dt * static_cast<double>(n_steps); }

  // Step index of output sample k, evenly spread and including 0 and n_steps.
  std::int64_t output_step(std::int64_t k) const { return k * n_steps / (output_points - 1); }

  double output_time(std::int64_t k) const { return dt * static_cast<double>(output_step(k)); }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be non-negative");
    if (!std::isfinite(omega) || !std::isfinite(epsilon)) throw ConfigError("Hamiltonian parameters must be finite");
    if (std::abs(omega) * dt > kMaxOmegaDt) throw ConfigError("Omega*dt exceeds the stability guard 0.01");
    if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
    if (output_points < 2 || output_points > n_steps + 1)
      throw ConfigError("output_points must lie in [2, n_steps + 1]");
  }

  // Horizon of `periods` Rabi periods T = 2 pi / Omega at `steps_per_period`.
  static SimConfig rabi(double periods, std::int64_t steps_per_period, double omega = 1.0, double kappa = 0.005) {
    SimConfig c;
    c.omega = omega;
    c.kappa = kappa;
    c.dt = 2.0 * std::numbers::pi / std::abs(omega) / static_cast<double>(steps_per_period);
    c.n_steps = std::llround(periods * static_cast<double>(steps_per_period));
    c.output_points = std::min<std::int64_t>(1000, c.n_steps + 1);
    return c;
  }
};

inline double rabi_period(double omega) { return 2.0 * std::numbers::pi / std::abs(omega); }

inline Matrix<2> hamiltonian(const SimConfig& cfg) { return 0.5 * cfg.omega * pauli::X + cfg.epsilon * pauli::Z; }

namespace coefficients {
inline double noise_gain(double kappa) { return std::sqrt(2.0 * kappa); }
inline double record_gain(double kappa) { return std::sqrt(8.0 * kappa); }
inline double dephasing(double kappa) { return 2.0 * kappa; }
}  // namespace coefficients

// D[a] rho = a rho a^dagger - (a^dagger a rho + rho a^dagger a) / 2
template <std::size_t N>
Matrix<N> dissipator(const Matrix<N>& a, const Matrix<N>& rho) {
  const Matrix<N> ad = a.adjoint();
  const Matrix<N> ada = ad * a;
  return a * rho * ad - 0.5 * (ada * rho + rho * ada);
}

// H[a] rho = a rho + rho a^dagger - Tr(a rho + rho a^dagger) rho
template <std::size_t N>
Matrix<N> meas_superop(const Matrix<N>& a, const Matrix<N>& rho) {
  const Matrix<N> s = a * rho + rho * a.adjoint();
  return s - s.trace() * rho;
}

template <std::size_t N>
Matrix<N> commutator(const Matrix<N>& a, const Matrix<N>& b) {
  return a * b - b * a;
}

// exp(-i H t) for H = h . sigma, closed form.
inline Matrix<2> unitary(const SimConfig& cfg, double t) {
  const double hx = 0.5 * cfg.omega;
  const double hz = cfg.epsilon;
  const double h = std::hypot(hx, hz);
  if (h == 0.0) return Matrix<2>::identity();
  const double c = std::cos(h * t);
  const double s = std::sin(h * t);
  const cplx mi(0.0, -1.0);
  return c * pauli::I + mi * s * ((hx / h) * pauli::X + (hz / h) * pauli::Z);
}

// Right-hand side of the Lindblad equation -i[H, rho] + 2k D[sz] rho.
inline Matrix<2> lindblad_rhs(const Matrix<2>& h, double kappa, const Matrix<2>& rho) {
  const cplx mi(0.0, -1.0);
  return mi * commutator(h, rho) + coefficients::dephasing(kappa) * dissipator(pauli::Z, rho);
}

// Right-hand side of the nonstochastic ensemble filter for rho_E given the
// ensemble-averaged <sigma_z> of the real state.
inline Matrix<2> ensemble_filter_rhs(const Matrix<2>& h, double kappa, const Matrix<2>& rho_e, double sz_r) {
  const double sz_e = trace_product(pauli::Z, rho_e).real();
  const double forcing = coefficients::noise_gain(kappa) * coefficients::record_gain(kappa) * (sz_r - sz_e);
  return lindblad_rhs(h, kappa, rho_e) + forcing * meas_superop(pauli::Z, rho_e);
}

// Precomputed single-step propagator for a fixed configuration.
class StepKernel {
 public:
  explicit StepKernel(const SimConfig& cfg)
      : kappa_(cfg.kappa),
        dt_(cfg.dt),
        noise_gain_(coefficients::noise_gain(cfg.kappa)),
        record_gain_(coefficients::record_gain(cfg.kappa)),
        u_(unitary(cfg, cfg.dt)),
        ud_(u_.adjoint()) {}

  // dy = sqrt(8k) <sigma_z> dt + dW
  double record_increment(const Qubit& rho, double dw) const {
    return record_gain_ * rho.expectation(pauli::Z) * dt_ + dw;
  }

  // Kraus update driven by record increment dy, then the exact unitary step.
  Qubit measure_and_rotate(const Qubit& rho, double dy) const {
    const double alpha = 1.0 + kappa_ * (dy * dy - 2.0 * dt_);
    const double beta = noise_gain_ * dy;
    const double m0 = alpha + beta;
    const double m1 = alpha - beta;
    Matrix<2> x = rho.matrix();
    x(0, 0) *= m0 * m0;
    x(0, 1) *= m0 * m1;
    x(1, 0) *= m0 * m1;
    x(1, 1) *= m1 * m1;
    try {
      return Qubit::normalized(u_ * x * ud_);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("stochastic step left the state space (dt too large?): ") + e.what());
    }
  }

  double dt() const { return dt_; }

 private:
  double kappa_;
  double dt_;
  double noise_gain_;
  double record_gain_;
  Matrix<2> u_;
  Matrix<2> ud_;
};

inline double record_increment(const Qubit& rho_r, const SimConfig& cfg, double dw) {
  return coefficients::record_gain(cfg.kappa) * rho_r.expectation(pauli::Z) * cfg.dt + dw;
}

// One step of the selective SME for rho_R.
inline Qubit step_sme(const Qubit& rho, const SimConfig& cfg, double dw) {
  const StepKernel k(cfg);
  return k.measure_and_rotate(rho, k.record_increment(rho, dw));
}

// One step of the quantum filter for rho_E, consuming the record increment dy
// of the same time step. The innovation is dy - sqrt(8k) <sigma_z>_E dt.
inline Qubit step_filter(const Qubit& rho_e, const SimConfig& cfg, double dy) {
  return StepKernel(cfg).measure_and_rotate(rho_e, dy);
}

// One RK4 step of the ensemble filter with <sigma_z>_R held fixed over dt.
inline Qubit step_ensemble_filter(const Qubit& rho_e, double sz_r_mean, const SimConfig& cfg) {
  const Matrix<2> h = hamiltonian(cfg);
  const double dt = cfg.dt;
  const Matrix<2>& y = rho_e.matrix();
  const Matrix<2> k1 = ensemble_filter_rhs(h, cfg.kappa, y, sz_r_mean);
  const Matrix<2> k2 = ensemble_filter_rhs(h, cfg.kappa, y + (0.5 * dt) * k1, sz_r_mean);
  const Matrix<2> k3 = ensemble_filter_rhs(h, cfg.kappa, y + (0.5 * dt) * k2, sz_r_mean);
  const Matrix<2> k4 = ensemble_filter_rhs(h, cfg.kappa, y + dt * k3, sz_r_mean);
  return Qubit::normalized(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

struct StateSeries {
  std::vector<double> times;
  std::vector<Qubit> states;
};

// rho_I(t) = U(t) rho0 U(t)^dagger at the output times.
inline StateSeries run_ideal(const SimConfig& cfg, const Qubit& rho0) {
  cfg.validate();
  StateSeries out;
  out.times.reserve(cfg.output_points);
  out.states.reserve(cfg.output_points);
  for (std::int64_t k = 0; k < cfg.output_points; ++k) {
    const double t = cfg.output_time(k);
    const Matrix<2> u = unitary(cfg, t);
    out.times.push_back(t);
    out.states.push_back(Qubit::normalized(u * rho0.matrix() * u.adjoint()));
  }
  return out;
}

inline StateSeries run_lindblad(const SimConfig& cfg, const Qubit& rho0) {
  cfg.validate();
  const Matrix<2> h = hamiltonian(cfg);
  const double dt = cfg.dt;
  StateSeries out;
  out.times.reserve(cfg.output_points);
  out.states.reserve(cfg.output_points);
  Matrix<2> y = rho0.matrix();
  std::int64_t step = 0;
  for (std::int64_t k = 0; k < cfg.output_points; ++k) {
    for (const std::int64_t target = cfg.output_step(k); step < target; ++step) {
      const Matrix<2> k1 = lindblad_rhs(h, cfg.kappa, y);
      const Matrix<2> k2 = lindblad_rhs(h, cfg.kappa, y + (0.5 * dt) * k1);
      const Matrix<2> k3 = lindblad_rhs(h, cfg.kappa, y + (0.5 * dt) * k2);
      const Matrix<2> k4 = lindblad_rhs(h, cfg.kappa, y + dt * k3);
      y = Qubit::normalized(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).matrix();
    }
    out.times.push_back(cfg.output_time(k));
    out.states.push_back(Qubit::normalized(y));
  }
  return out;
}

struct EnsembleFilterSeries {
  std::vector<double> times;
  std::vector<Qubit> rho_r;  // Lindblad (ensemble-averaged real state)
  std::vector<Qubit> rho_e;  // nonstochastic filter estimate
  std::vector<Qubit> rho_i;  // ideal unitary state
};

// Co-integrates the Lindblad state and the ensemble filter with a joint RK4
// so the forcing <sigma_z>_R is evaluated at every stage. `sample_times`
// (ascending, within [0, horizon]) lists where states are recorded; each gap
// is covered by equal substeps no longer than cfg.dt.
inline EnsembleFilterSeries run_ensemble_filter(const SimConfig& cfg, const Qubit& rho0_r, const Qubit& rho0_e,
                                                const std::vector<double>& sample_times) {
  cfg.validate();
  const Matrix<2> h = hamiltonian(cfg);
  EnsembleFilterSeries out;
  Matrix<2> r = rho0_r.matrix();
  Matrix<2> e = rho0_e.matrix();
  double t = 0.0;

  auto rhs = [&](const Matrix<2>& rr, const Matrix<2>& ee, Matrix<2>& dr, Matrix<2>& de) {
    dr = lindblad_rhs(h, cfg.kappa, rr);
    de = ensemble_filter_rhs(h, cfg.kappa, ee, trace_product(pauli::Z, rr).real());
  };

  for (const double target : sample_times) {
    if (target < t - 1e-12) throw ConfigError("sample times must be ascending and non-negative");
    const double gap = target - t;
    const auto n = static_cast<std::int64_t>(std::ceil(gap / cfg.dt - 1e-9));
    if (n > 0) {
      const double dt = gap / static_cast<double>(n);
      for (std::int64_t s = 0; s < n; ++s) {
        Matrix<2> r1, e1, r2, e2, r3, e3, r4, e4;
        rhs(r, e, r1, e1);
        rhs(r + (0.5 * dt) * r1, e + (0.5 * dt) * e1, r2, e2);
        rhs(r + (0.5 * dt) * r2, e + (0.5 * dt) * e2, r3, e3);
        rhs(r + dt * r3, e + dt * e3, r4, e4);
        r = Qubit::normalized(r + (dt / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4)).matrix();
        try {
          e = Qubit::normalized(e + (dt / 6.0) * (e1 + 2.0 * e2 + 2.0 * e3 + e4)).matrix();
        } catch (const NumericalError& err) {
          std::ostringstream os;
          os << "ensemble filter lost positivity near t=" << t + dt * static_cast<double>(s + 1) << ": "
             << err.what();
          throw NumericalError(os.str());
        }
      }
    }
    t = target;
    const Matrix<2> u = unitary(cfg, t);
    out.times.push_back(t);
    out.rho_r.push_back(Qubit::normalized(r));
    out.rho_e.push_back(Qubit::normalized(e));
    out.rho_i.push_back(Qubit::normalized(u * rho0_r.matrix() * u.adjoint()));
  }
  return out;
}

// Same, sampled at the configuration's output times.
inline EnsembleFilterSeries run_ensemble_filter(const SimConfig& cfg, const Qubit& rho0_r, const Qubit& rho0_e) {
  std::vector<double> times;
  times.reserve(cfg.output_points);
  for (std::int64_t k = 0; k < cfg.output_points; ++k) times.push_back(cfg.output_time(k));
  return run_ensemble_filter(cfg, rho0_r, rho0_e, times);
}

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Qubit> rho_r;
  std::vector<Qubit> rho_e;
  std::vector<Qubit> rho_i;
  // Record accumulated over the interval ending at each output time (0 at t=0).
  std::vector<double> dy;
};

// Co-evolves the selective SME (which generates dy) and the filter (which
// consumes the same dy), step-locked. `trajectory` selects the noise stream.
inline TrajectoryRecord run_trajectory(const SimConfig& cfg, const Qubit& rho0_r, const Qubit& rho0_e,
                                       std::uint64_t trajectory = 0) {
  cfg.validate();
  const StepKernel kernel(cfg);
  WienerStream noise(cfg.seed, trajectory);
  TrajectoryRecord rec;
  const auto n_out = static_cast<std::size_t>(cfg.output_points);
  rec.times.reserve(n_out);
  rec.rho_r.reserve(n_out);
  rec.rho_e.reserve(n_out);
  rec.rho_i.reserve(n_out);
  rec.dy.reserve(n_out);

  Qubit r = rho0_r;
  Qubit e = rho0_e;
  std::int64_t step = 0;
  for (std::int64_t k = 0; k < cfg.output_points; ++k) {
    double y_acc = 0.0;
    for (const std::int64_t target = cfg.output_step(k); step < target; ++step) {
      const double dw = noise.next(cfg.dt);
      const double dy = kernel.record_increment(r, dw);
      r = kernel.measure_and_rotate(r, dy);
      e = kernel.measure_and_rotate(e, dy);
      y_acc += dy;
    }
    const double t = cfg.output_time(k);
    const Matrix<2> u = unitary(cfg, t);
    rec.times.push_back(t);
    rec.rho_r.push_back(r);
    rec.rho_e.push_back(e);
    rec.rho_i.push_back(Qubit::normalized(u * rho0_r.matrix() * u.adjoint()));
    rec.dy.push_back(y_acc);
  }
  return rec;
}

}  // namespace qfilter
