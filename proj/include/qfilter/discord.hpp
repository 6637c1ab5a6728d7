#pragma once

// Projective apparatus measurements on a system (x) apparatus qubit pair and
// the discord lower bound on the relative-entropy confidence.
//
// For rho_m = sum_j (I (x) P_j) rho (I (x) P_j) the confidence
// S(rho||rho_m) equals S(rho_m) - S(rho); minimizing over apparatus bases
// gives the discord D <= C.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "qfilter/errors.hpp"
#include "qfilter/linalg.hpp"
#include "qfilter/qstate.hpp"

namespace qfilter {

// Orthonormal apparatus basis
//   |0'> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
//   |1'> = -e^{-i phi} sin(theta/2)|0> + cos(theta/2)|1>
struct ApparatusBasis {
  double theta = 0.0;
  double phi = 0.0;

  std::array<std::array<cplx, 2>, 2> kets() const {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const cplx e = std::polar(1.0, phi);
    return {{{c, e * s}, {-std::conj(e) * s, c}}};
  }

  std::array<Matrix<2>, 2> projectors() const {
    std::array<Matrix<2>, 2> p;
    const auto k = kets();
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) p[j](a, b) = k[j][a] * std::conj(k[j][b]);
    return p;
  }

  static ApparatusBasis computational() { return {}; }
};

inline TwoQubit post_measurement_state(const TwoQubit& rho, const ApparatusBasis& basis) {
  Matrix<4> out;
  for (const auto& p : basis.projectors()) {
    const Matrix<4> lift = kron(pauli::I, p);
    out += lift * rho.matrix() * lift;
  }
  return TwoQubit::normalized(out);
}

// S(rho_m) from the two 2x2 system blocks <j|rho|j>, whose direct sum is
// rho_m in the rotated apparatus frame.
inline double measured_entropy(const TwoQubit& rho, const ApparatusBasis& basis) {
  const auto k = basis.kets();
  double s = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    Matrix<2> block;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) {
        cplx v = 0.0;
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t y = 0; y < 2; ++y) v += std::conj(k[j][x]) * rho(a * 2 + x, b * 2 + y) * k[j][y];
        block(a, b) = v;
      }
    const double tr = block.trace().real();
    const double lo = min_eigenvalue(block);
    for (const double l : {lo, tr - lo})
      if (l > tolerance::kEigenFloor) s -= l * std::log(l);
  }
  return s;
}

inline constexpr double kRouteAgreement = 1e-9;

// C = S(rho||rho_m), cross-checked against S(rho_m) - S(rho).
inline double povm_confidence(const TwoQubit& rho, const ApparatusBasis& basis) {
  const TwoQubit measured = post_measurement_state(rho, basis);
  const double by_relative_entropy = relative_entropy(rho, measured);
  const double by_entropy_gap = von_neumann_entropy(measured) - von_neumann_entropy(rho);
  if (!(std::abs(by_relative_entropy - by_entropy_gap) <= kRouteAgreement)) {
    std::ostringstream os;
    os << "confidence routes disagree: S(rho||rho_m)=" << by_relative_entropy
       << " vs S(rho_m)-S(rho)=" << by_entropy_gap;
    throw NumericalError(os.str());
  }
  return by_entropy_gap;
}

struct DiscordResult {
  double value = 0.0;
  ApparatusBasis basis;
};

namespace detail {

template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

// Minimizes S(rho_m) - S(rho) over a theta x phi grid, then refines the best
// grid points by alternating golden-section line searches. The result is
// attained by an explicit basis, so it never undercuts the true minimum.
inline DiscordResult discord_lower_bound(const TwoQubit& rho, int resolution = 64) {
  if (resolution < 8) throw ConfigError("discord grid resolution must be at least 8");
  const double s_rho = von_neumann_entropy(rho);
  auto f = [&](double theta, double phi) { return measured_entropy(rho, {theta, phi}); };

  const int n = resolution;
  const double d_theta = std::numbers::pi / (n - 1);
  const double d_phi = 2.0 * std::numbers::pi / n;
  struct Sample {
    double value, theta, phi;
  };
  std::vector<Sample> grid;
  grid.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double th = d_theta * i;
      const double ph = d_phi * j;
      grid.push_back({f(th, ph), th, ph});
    }
  std::stable_sort(grid.begin(), grid.end(), [](const Sample& l, const Sample& r) { return l.value < r.value; });

  Sample best = grid.front();
  const std::size_t starts = std::min<std::size_t>(4, grid.size());
  for (std::size_t s = 0; s < starts; ++s) {
    double th = grid[s].theta;
    double ph = grid[s].phi;
    double val = grid[s].value;
    double width_th = d_theta;
    double width_ph = d_phi;
    for (int cycle = 0; cycle < 200; ++cycle) {
      const double th_new = detail::golden_section([&](double x) { return f(x, ph); }, th - width_th, th + width_th, 1e-12);
      const double ph_new =
          detail::golden_section([&](double x) { return f(th_new, x); }, ph - width_ph, ph + width_ph, 1e-12);
      const double v_new = f(th_new, ph_new);
      if (!(v_new < val)) break;
      const double moved = std::max(std::abs(th_new - th), std::abs(ph_new - ph));
      const bool converged = val - v_new < 1e-15;
      th = th_new;
      ph = ph_new;
      val = v_new;
      width_th = std::max(4.0 * moved, 1e-6);
      width_ph = width_th;
      if (converged) break;
    }
    if (val < best.value) best = {val, th, ph};
  }
  return {best.value - s_rho, {best.theta, best.phi}};
}

}  // namespace qfilter
