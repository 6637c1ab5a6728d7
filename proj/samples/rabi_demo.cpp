// Follows one measured trajectory for a few Rabi periods and prints how the
// filter estimate locks onto the real state.

#include <cstdio>

#include "qfilter/dynamics.hpp"
#include "qfilter/metrics.hpp"

int main() {
  using namespace qfilter;
  SimConfig cfg = SimConfig::rabi(15.0, 10000);
  cfg.output_points = 31;
  const TrajectoryRecord rec = run_trajectory(cfg, states::left(), Qubit::maximally_mixed());
  std::printf("%8s %9s %9s %9s %9s\n", "t/T", "P_L real", "P_L est", "1-F(E,R)", "S(R||E)");
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    std::printf("%8.2f %9.4f %9.4f %9.2e %9.2e\n", rec.times[k] / rabi_period(cfg.omega),
                population_left(rec.rho_r[k]), population_left(rec.rho_e[k]),
                confidence(rec.rho_e[k], rec.rho_r[k], Measure::Fidelity),
                confidence(rec.rho_e[k], rec.rho_r[k], Measure::RelativeEntropy));
  }
}
