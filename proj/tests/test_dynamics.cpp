#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qfilter/dynamics.hpp"
#include "qfilter/random.hpp"

using namespace qfilter;

namespace {

constexpr double kPi = std::numbers::pi;

SimConfig fast(double periods, double kappa = 0.005) { return SimConfig::rabi(periods, 10000, 1.0, kappa); }

double sz(const Qubit& q) { return q.expectation(pauli::Z); }

}  // namespace

TEST(Superoperators, DissipatorExamples) {
  EXPECT_LE(max_abs(dissipator(pauli::Z, Qubit::maximally_mixed().matrix())), 1e-15);
  EXPECT_LE(max_abs(dissipator(pauli::Z, states::left().matrix())), 1e-15);
  const Matrix<2> d = dissipator(pauli::Z, states::plus().matrix());
  EXPECT_LE(max_abs_diff(d, states::minus().matrix() - states::plus().matrix()), 1e-15);
  EXPECT_NEAR(oracle::bloch_of(d)[0], -2.0, 1e-15);
}

TEST(Superoperators, MeasurementExamples) {
  EXPECT_LE(max_abs(meas_superop(pauli::Z, states::left().matrix())), 1e-15);
  EXPECT_LE(max_abs_diff(meas_superop(pauli::Z, Qubit::maximally_mixed().matrix()), pauli::Z), 1e-15);
  EXPECT_LE(max_abs_diff(meas_superop(pauli::Z, states::plus().matrix()), pauli::Z), 1e-15);
}

TEST(Superoperators, TracelessAndHermitianOnRandomStates) {
  StateSampler s(201, 0);
  for (int i = 0; i < 200; ++i) {
    const Matrix<2> r = s.bloch_ball().matrix();
    for (const Matrix<2>& m : {dissipator(pauli::Z, r), meas_superop(pauli::Z, r)}) {
      EXPECT_LE(std::abs(m.trace()), 1e-15);
      EXPECT_LE(hermiticity_defect(m), 1e-15);
    }
  }
}

TEST(Coefficients, RecordGainAtDefaultStrength) {
  EXPECT_NEAR(coefficients::record_gain(0.005), 0.2, 1e-15);
  EXPECT_NEAR(coefficients::noise_gain(0.005) * coefficients::record_gain(0.005), 4.0 * 0.005, 1e-15);
}

TEST(RecordIncrement, Examples) {
  const SimConfig cfg = fast(1.0);
  EXPECT_NEAR(record_increment(states::left(), cfg, 0.0), 0.2 * cfg.dt, 1e-18);
  EXPECT_DOUBLE_EQ(record_increment(Qubit::maximally_mixed(), cfg, 0.0123), 0.0123);
  EXPECT_DOUBLE_EQ(record_increment(states::plus(), cfg, -0.5), -0.5);
}

TEST(StepSme, ZeroStrengthIsUnitary) {
  SimConfig cfg = fast(1.0, 0.0);
  Qubit r = BlochVector{0.6, 0.0, 0.8}.to_density();
  WienerStream w(1, 0);
  for (int i = 0; i < 1000; ++i) r = step_sme(r, cfg, w.next(cfg.dt) * 50.0);
  EXPECT_NEAR(purity(r), 1.0, 1e-10);
  const Matrix<2> u = unitary(cfg, 1000 * cfg.dt);
  const Qubit ideal = Qubit::normalized(u * BlochVector{0.6, 0.0, 0.8}.to_density().matrix() * u.adjoint());
  EXPECT_LE(max_abs_diff(r.matrix(), ideal.matrix()), 1e-12);
}

TEST(StepSme, EigenstateOnlyRotates) {
  const SimConfig cfg = fast(1.0);
  // Measurement terms vanish on |L><L|: a zero-noise step is the bare rotation
  // up to the O(k dt) Kraus normalization, which cancels for an eigenprojector.
  const Qubit next = step_sme(states::left(), cfg, 0.0);
  const Matrix<2> u = unitary(cfg, cfg.dt);
  EXPECT_LE(max_abs_diff(next.matrix(), u * states::left().matrix() * u.adjoint()), 1e-15);
}

TEST(StepFilter, CoincidesWithSmeOnEqualStates) {
  const SimConfig cfg = fast(1.0);
  StateSampler s(202, 0);
  WienerStream w(2, 0);
  for (int i = 0; i < 200; ++i) {
    const Qubit r = s.bloch_ball();
    const double dw = w.next(cfg.dt);
    EXPECT_EQ(step_sme(r, cfg, dw), step_filter(r, cfg, record_increment(r, cfg, dw)));
  }
}

TEST(StepFilter, ZeroStrengthIgnoresRecord) {
  const SimConfig cfg = fast(1.0, 0.0);
  const Qubit e = BlochVector{0.1, 0.2, 0.3}.to_density();
  EXPECT_LE(max_abs_diff(step_filter(e, cfg, 0.7).matrix(), step_filter(e, cfg, -3.0).matrix()), 1e-15);
}

TEST(KrausStep, ConvergesAndAgreesWithEulerMaruyama) {
  // Path-wise comparison on shared Brownian paths: each coarse increment is a
  // sum of fine ones. Reference is the Kraus scheme on the fine grid.
  const double kappa = 0.25, fine = 1e-5;
  const int n_fine = 100000, n_paths = 8;
  const std::array<double, 3> dts = {1e-2, 1e-3, 1e-4};
  std::array<double, 3> em_gap{}, kraus_err{};
  for (int p = 0; p < n_paths; ++p) {
    std::vector<double> dw_fine(n_fine);
    WienerStream w(77, p);
    for (auto& x : dw_fine) x = w.next(fine);
    SimConfig ref_cfg;
    ref_cfg.kappa = kappa;
    ref_cfg.dt = fine;
    Qubit ref = states::plus();
    for (const double dw : dw_fine) ref = step_sme(ref, ref_cfg, dw);
    for (std::size_t i = 0; i < dts.size(); ++i) {
      SimConfig cfg;
      cfg.kappa = kappa;
      cfg.dt = dts[i];
      const int stride = static_cast<int>(std::lround(dts[i] / fine));
      Matrix<2> m = states::plus().matrix();
      Qubit q = states::plus();
      for (int k = 0; k < n_fine / stride; ++k) {
        double dw = 0.0;
        for (int j = 0; j < stride; ++j) dw += dw_fine[k * stride + j];
        q = step_sme(q, cfg, dw);
        m = oracle::euler_maruyama_sme(m, cfg.omega, cfg.epsilon, kappa, cfg.dt, dw);
      }
      em_gap[i] += max_abs_diff(q.matrix(), m) / n_paths;
      kraus_err[i] += max_abs_diff(q.matrix(), ref.matrix()) / n_paths;
    }
  }
  EXPECT_GT(em_gap[0], em_gap[1]);
  EXPECT_GT(em_gap[1], em_gap[2]);
  EXPECT_LT(em_gap[2], std::sqrt(dts[2]));  // Euler-Maruyama is strong order 1/2
  // Strong order one: two decades of dt buy well over one decade of accuracy.
  EXPECT_GT(kraus_err[0] / kraus_err[2], 30.0);
}

TEST(StepEnsembleFilter, WithoutForcingIsLindbladStep) {
  SimConfig cfg = fast(1.0);
  cfg.n_steps = 1;
  cfg.output_points = 2;
  // |+>: <sigma_z> stays zero along every RK stage, so sz_R = 0 removes the forcing exactly.
  const Qubit next = step_ensemble_filter(states::plus(), 0.0, cfg);
  const Qubit lind = run_lindblad(cfg, states::plus()).states.back();
  EXPECT_LE(max_abs_diff(next.matrix(), lind.matrix()), 1e-15);
}

TEST(RunIdeal, RabiFormulaAndPeriodicity) {
  SimConfig cfg = fast(3.0);
  const auto s = run_ideal(cfg, states::left());
  for (std::size_t k = 0; k < s.times.size(); ++k)
    EXPECT_NEAR(population_left(s.states[k]), std::pow(std::cos(0.5 * s.times[k]), 2), 1e-12);
  EXPECT_LE(max_abs_diff(s.states.back().matrix(), states::left().matrix()), 1e-10);
  SimConfig still = cfg;
  still.omega = 0.0;
  for (const auto& q : run_ideal(still, states::left()).states)
    EXPECT_LE(max_abs_diff(q.matrix(), states::left().matrix()), 0.0);
}

TEST(RunLindblad, ZeroStrengthMatchesIdeal) {
  const SimConfig cfg = fast(5.0, 0.0);
  const auto a = run_lindblad(cfg, states::left());
  const auto b = run_ideal(cfg, states::left());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    EXPECT_LE(max_abs_diff(a.states[k].matrix(), b.states[k].matrix()), 1e-8);
}

TEST(RunLindblad, MatchesBlochOracle) {
  for (const double eps : {0.0, 0.3}) {
    SimConfig cfg = fast(15.0);
    cfg.epsilon = eps;
    const auto s = run_lindblad(cfg, states::left());
    const auto ref = oracle::bloch_lindblad(cfg.omega, eps, 4.0 * cfg.kappa, {0.0, 0.0, 1.0}, s.times);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const auto b = oracle::bloch_of(s.states[k]);
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(b[c], ref[k][c], 1e-6) << "eps=" << eps << " k=" << k;
      EXPECT_NEAR(s.states[k].matrix().trace().real(), 1.0, 1e-10);
    }
  }
}

TEST(RunLindblad, HalvingStepChangesOutputByLessThanTolerance) {
  SimConfig a = fast(15.0);
  a.output_points = 151;
  SimConfig b = SimConfig::rabi(15.0, 20000);
  b.output_points = 151;
  const auto sa = run_lindblad(a, states::left());
  const auto sb = run_lindblad(b, states::left());
  for (std::size_t k = 0; k < sa.states.size(); ++k) {
    ASSERT_DOUBLE_EQ(sa.times[k], sb.times[k]);
    EXPECT_LE(max_abs_diff(sa.states[k].matrix(), sb.states[k].matrix()), 1e-6);
  }
}

TEST(RunLindblad, RelaxesToMaximallyMixed) {
  SimConfig cfg = SimConfig::rabi(50.0, 1000, 1.0, 0.1);
  const auto s = run_lindblad(cfg, states::left());
  EXPECT_LE(max_abs_diff(s.states.back().matrix(), Qubit::maximally_mixed().matrix()), 1e-9);
}

TEST(RunEnsembleFilter, ZeroStrengthIsRabiOscillation) {
  const SimConfig cfg = fast(3.0, 0.0);
  const auto s = run_ensemble_filter(cfg, states::left(), states::left());
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    EXPECT_LE(max_abs_diff(s.rho_e[k].matrix(), s.rho_i[k].matrix()), 1e-8);
    EXPECT_LE(max_abs_diff(s.rho_r[k].matrix(), s.rho_i[k].matrix()), 1e-8);
  }
}

TEST(RunEnsembleFilter, SampleTimesMustAscend) {
  const SimConfig cfg = fast(1.0);
  EXPECT_THROW(run_ensemble_filter(cfg, states::left(), Qubit::maximally_mixed(), {1.0, 0.5}), ConfigError);
}

TEST(RunTrajectory, BitwiseDeterministic) {
  const SimConfig cfg = fast(2.0);
  const auto a = run_trajectory(cfg, states::left(), Qubit::maximally_mixed(), 5);
  const auto b = run_trajectory(cfg, states::left(), Qubit::maximally_mixed(), 5);
  EXPECT_EQ(a.rho_r, b.rho_r);
  EXPECT_EQ(a.rho_e, b.rho_e);
  EXPECT_EQ(a.dy, b.dy);
  const auto c = run_trajectory(cfg, states::left(), Qubit::maximally_mixed(), 6);
  EXPECT_NE(a.dy, c.dy);
}

TEST(RunTrajectory, SeriesShareLengthAndOutputGrid) {
  const SimConfig cfg = fast(15.0);
  const auto r = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  ASSERT_EQ(r.times.size(), 1000u);
  EXPECT_EQ(r.rho_r.size(), 1000u);
  EXPECT_EQ(r.rho_e.size(), 1000u);
  EXPECT_EQ(r.rho_i.size(), 1000u);
  EXPECT_EQ(r.dy.size(), 1000u);
  EXPECT_EQ(r.times.front(), 0.0);
  EXPECT_NEAR(r.times.back(), 15.0 * 2.0 * kPi, 1e-9);
}

TEST(RunTrajectory, ZeroStrengthFollowsIdeal) {
  const SimConfig cfg = fast(5.0, 0.0);
  const auto r = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  for (std::size_t k = 0; k < r.times.size(); ++k)
    EXPECT_LE(max_abs_diff(r.rho_r[k].matrix(), r.rho_i[k].matrix()), 1e-8);
}

TEST(RunTrajectory, EqualInitialStatesStayEqual) {
  const SimConfig cfg = fast(5.0);
  const auto r = run_trajectory(cfg, states::left(), states::left());
  for (std::size_t k = 0; k < r.times.size(); ++k)
    EXPECT_LE(max_abs_diff(r.rho_r[k].matrix(), r.rho_e[k].matrix()), 1e-8);
}

TEST(RunTrajectory, PurityPreservedAlongRealization) {
  const SimConfig cfg = fast(15.0);
  const auto r = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  for (const auto& q : r.rho_r) EXPECT_NEAR(purity(q), 1.0, 1e-6);
}

TEST(RunTrajectory, DetuningSmokeRun) {
  SimConfig cfg = fast(3.0, 0.02);
  cfg.epsilon = 0.4;
  const auto r = run_trajectory(cfg, states::left(), Qubit::maximally_mixed(), 3);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    EXPECT_NEAR(purity(r.rho_r[k]), 1.0, 1e-6);
    EXPECT_NEAR(purity(r.rho_i[k]), 1.0, 1e-12);
    EXPECT_NEAR(r.rho_e[k].matrix().trace().real(), 1.0, 1e-10);
  }
  // Detuned Rabi oscillations never fully empty |L>.
  double min_pl = 1.0;
  for (const auto& q : r.rho_i) min_pl = std::min(min_pl, population_left(q));
  const double h = std::hypot(0.5, 0.4);
  EXPECT_NEAR(min_pl, 1.0 - std::pow(0.5 / h, 2), 1e-3);
}

TEST(Innovation, WhiteOnceFilterHasConverged) {
  const SimConfig cfg = fast(15.0);
  const StepKernel k(cfg);
  WienerStream w(cfg.seed, 99);
  Qubit r = states::left(), e = Qubit::maximally_mixed();
  for (std::int64_t i = 0; i < cfg.n_steps; ++i) {
    const double dy = k.record_increment(r, w.next(cfg.dt));
    r = k.measure_and_rotate(r, dy);
    e = k.measure_and_rotate(e, dy);
  }
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dy = k.record_increment(r, w.next(cfg.dt));
    const double innovation = dy - coefficients::record_gain(cfg.kappa) * sz(e) * cfg.dt;
    s1 += innovation;
    s2 += innovation * innovation;
    r = k.measure_and_rotate(r, dy);
    e = k.measure_and_rotate(e, dy);
  }
  EXPECT_LE(std::abs(s1 / n), 4.0 * std::sqrt(cfg.dt / n));
  EXPECT_NEAR(s2 / n, cfg.dt, 4.0 * cfg.dt * std::sqrt(2.0 / n));
}

TEST(SimConfig, Validation) {
  SimConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 0.011;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.kappa = -1e-9;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.output_points = cfg.n_steps + 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(run_trajectory(cfg, states::left(), states::left()), ConfigError);
}

TEST(SimConfig, OutputGridIncludesEnds) {
  const SimConfig cfg = fast(15.0);
  EXPECT_EQ(cfg.output_step(0), 0);
  EXPECT_EQ(cfg.output_step(cfg.output_points - 1), cfg.n_steps);
  for (std::int64_t k = 1; k < cfg.output_points; ++k) EXPECT_GT(cfg.output_step(k), cfg.output_step(k - 1));
}
