#include <gtest/gtest.h>

#include <numbers>

#include "qfilter/metrics.hpp"

using namespace qfilter;

namespace {
constexpr Measure kBoth[] = {Measure::Fidelity, Measure::RelativeEntropy};
}

TEST(Confidence, Examples) {
  const Qubit l = states::left(), mixed = Qubit::maximally_mixed();
  for (const Measure m : kBoth) EXPECT_NEAR(confidence(l, l, m), 0.0, 1e-12);
  EXPECT_NEAR(confidence(mixed, l, Measure::Fidelity), 0.5, 1e-12);
  EXPECT_NEAR(confidence(mixed, l, Measure::RelativeEntropy), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(1.0 - confidence(mixed, l, Measure::Fidelity), 0.5, 1e-12);
}

TEST(Confidence, EntropyOrderingIsRealAgainstEstimate) {
  // C = S(rho_R || rho_E): finite for a pure real state and a mixed estimate,
  // infinite the other way around.
  const Qubit real = states::left(), est = Qubit::maximally_mixed();
  EXPECT_TRUE(std::isfinite(confidence(est, real, Measure::RelativeEntropy)));
  EXPECT_EQ(confidence(real, est, Measure::RelativeEntropy), kInfinity);
}

TEST(Backaction, ZeroAtEqualStatesAndOrdering) {
  const Qubit s = BlochVector{0.2, 0.3, -0.4}.to_density();
  for (const Measure m : kBoth) EXPECT_NEAR(backaction(s, s, m), 0.0, 1e-12);
  // B = S(rho_I || rho_R): pure ideal against mixed real is finite.
  const Qubit ideal = states::left(), real = BlochVector{0.0, 0.0, 0.9}.to_density();
  EXPECT_TRUE(std::isfinite(backaction(ideal, real, Measure::RelativeEntropy)));
  EXPECT_EQ(relative_entropy(real, ideal), kInfinity);
}

TEST(Epitome, Examples) {
  const Qubit ideal = states::left(), est = Qubit::maximally_mixed();
  EXPECT_NEAR(epitome(ideal, est, Measure::RelativeEntropy), std::numbers::ln2, 1e-12);
  EXPECT_NEAR(epitome(ideal, est, Measure::Fidelity), 0.5, 1e-12);
  for (const Measure m : kBoth) EXPECT_NEAR(epitome(ideal, ideal, m), 0.0, 1e-12);
}

TEST(Metrics, NonNegativeAndZeroTogether) {
  StateSampler s(301, 0);
  for (int i = 0; i < 500; ++i) {
    const Qubit a = s.bloch_ball(), b = i % 4 ? s.bloch_ball() : a;
    const double f = confidence(a, b, Measure::Fidelity);
    const double re = confidence(a, b, Measure::RelativeEntropy);
    EXPECT_GE(f, -1e-12);
    EXPECT_GE(re, -1e-12);
    EXPECT_EQ(f <= 1e-9, re <= 1e-9) << i;
  }
}

TEST(Metrics, SeriesFromTrajectory) {
  const SimConfig cfg = SimConfig::rabi(2.0, 10000);
  const auto rec = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  const MetricSeries m = compute_metrics(rec);
  ASSERT_EQ(m.size(), rec.times.size());
  EXPECT_NEAR(m.c_fid[0], 0.5, 1e-12);
  EXPECT_EQ(m.b_fid[0], 0.0);
  EXPECT_EQ(m.b_re[0], 0.0);
  EXPECT_NEAR(m.e_re[0], std::numbers::ln2, 1e-12);
  for (std::size_t k = 0; k < m.size(); ++k) {
    for (const double v : {m.c_fid[k], m.b_fid[k], m.e_fid[k], m.c_re[k], m.b_re[k], m.e_re[k]})
      EXPECT_GE(v, -1e-12);
  }
}

TEST(Metrics, ZeroStrengthHasNoBackaction) {
  const SimConfig cfg = SimConfig::rabi(5.0, 10000, 1.0, 0.0);
  const auto rec = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  const MetricSeries m = compute_metrics(rec);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_LE(m.b_fid[k], 1e-8);
}

TEST(Metrics, InfiniteMask) {
  EXPECT_TRUE(MetricSeries::infinite(kInfinity));
  EXPECT_FALSE(MetricSeries::infinite(1e300));
}
