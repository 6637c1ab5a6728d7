#pragma once

// Density operators and the distance measures built on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "qfilter/errors.hpp"
#include "qfilter/linalg.hpp"
#include "qfilter/random.hpp"

namespace qfilter {

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
// Eigenvalues in [-kNegative, kEigenFloor] are treated as zero (clamped to
// kEigenFloor before logarithms); anything below -kNegative is unphysical.
inline constexpr double kNegative = 1e-9;
inline constexpr double kEigenFloor = 1e-12;
// Weight of sigma on a null eigenvector of rho beyond which S(sigma||rho) = inf.
inline constexpr double kSupport = 1e-9;
}  // namespace tolerance

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A d x d Hermitian, unit-trace, positive semidefinite operator. Instances
// can only be obtained through the validating factories, so every
// DensityMatrix in the program satisfies the invariants.
template <std::size_t N>
class DensityMatrix {
 public:
  static constexpr std::size_t dim = N;

  // Hermitize, rescale to unit trace, then validate.
  static DensityMatrix normalized(const Matrix<N>& m) {
    Matrix<N> h = m.hermitian_part();
    const double tr = h.trace().real();
    if (!(std::abs(tr) > 1e-300) || !std::isfinite(tr))
      throw NumericalError("density matrix normalization: trace is zero or not finite");
    h *= 1.0 / tr;
    for (std::size_t i = 0; i < N; ++i) h(i, i) = h(i, i).real();
    check_positive(h);
    return DensityMatrix(h);
  }

  // Validate as-is: the matrix must already be Hermitian and unit trace.
  static DensityMatrix from_matrix(const Matrix<N>& m) {
    if (hermiticity_defect(m) > tolerance::kHermitian)
      throw NumericalError("density matrix is not Hermitian");
    if (std::abs(m.trace() - 1.0) > tolerance::kTrace)
      throw NumericalError("density matrix does not have unit trace");
    const Matrix<N> h = m.hermitian_part();
    check_positive(h);
    return DensityMatrix(h);
  }

  static DensityMatrix pure(const std::array<cplx, N>& ket) {
    double norm2 = 0.0;
    for (const auto& c : ket) norm2 += std::norm(c);
    if (!(norm2 > 0.0)) throw ConfigError("pure state from a zero vector");
    Matrix<N> m;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) m(i, j) = ket[i] * std::conj(ket[j]) / norm2;
    return normalized(m);
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix<N>::identity() * (1.0 / N)); }

  const Matrix<N>& matrix() const { return m_; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  // Tr(op rho), real part (op is assumed Hermitian).
  double expectation(const Matrix<N>& op) const { return trace_product(op, m_).real(); }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  explicit DensityMatrix(const Matrix<N>& m) : m_(m) {}

  static void check_positive(const Matrix<N>& h) {
    const double lo = min_eigenvalue(h);
    if (!(lo >= -tolerance::kNegative)) {
      std::ostringstream os;
      os << "positivity violation: smallest eigenvalue " << lo;
      throw NumericalError(os.str());
    }
  }

  Matrix<N> m_;
};

using Qubit = DensityMatrix<2>;
using TwoQubit = DensityMatrix<4>;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  Qubit to_density() const {
    if (norm() > 1.0 + 1e-9) throw ConfigError("Bloch vector outside the unit ball");
    return Qubit::normalized(0.5 * (pauli::I + x * pauli::X + y * pauli::Y + z * pauli::Z));
  }

  static BlochVector of(const Qubit& rho) {
    return {rho.expectation(pauli::X), rho.expectation(pauli::Y), rho.expectation(pauli::Z)};
  }
};

namespace states {
inline Qubit left() { return Qubit::pure({1.0, 0.0}); }
inline Qubit right() { return Qubit::pure({0.0, 1.0}); }
inline Qubit plus() { return Qubit::pure({1.0, 1.0}); }
inline Qubit minus() { return Qubit::pure({1.0, -1.0}); }
// (|00> + |11>)/sqrt(2), ordering system (x) apparatus.
inline TwoQubit bell_phi_plus() { return TwoQubit::pure({1.0, 0.0, 0.0, 1.0}); }

inline TwoQubit product(const Qubit& system, const Qubit& apparatus) {
  return TwoQubit::normalized(kron(system.matrix(), apparatus.matrix()));
}
}  // namespace states

// P_L = <L|rho|L>
inline double population_left(const Qubit& rho) { return rho(0, 0).real(); }

template <std::size_t N>
double purity(const DensityMatrix<N>& rho) {
  return trace_product(rho.matrix(), rho.matrix()).real();
}

// Uhlmann fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2, clamped to [0, 1].
// Eigenvalues at or below the floor count as zero: sqrt would otherwise turn
// 1e-16 round-off into 1e-8 errors for pure arguments.
template <std::size_t N>
double fidelity(const DensityMatrix<N>& rho, const DensityMatrix<N>& sigma) {
  auto root = [](double l) { return l > tolerance::kEigenFloor ? std::sqrt(l) : 0.0; };
  const Matrix<N> sqrt_sigma = apply_spectral(eigh(sigma.matrix()), root);
  const auto inner = eigh(sqrt_sigma * rho.matrix() * sqrt_sigma);
  double s = 0.0;
  for (double l : inner.values) s += root(l);
  return std::clamp(s * s, 0.0, 1.0);
}

// -sum l ln l in nats, with 0 ln 0 = 0 for eigenvalues at or below the floor.
template <std::size_t N>
double von_neumann_entropy(const DensityMatrix<N>& rho) {
  const auto es = eigh(rho.matrix());
  double s = 0.0;
  for (double l : es.values) {
    if (l < -tolerance::kNegative) throw NumericalError("entropy of a non-positive operator");
    if (l > tolerance::kEigenFloor) s -= l * std::log(l);
  }
  return s;
}

// S(sigma||rho) = -Tr sigma ln rho - S(sigma), nats. Returns kInfinity when
// sigma has weight on the (numerical) kernel of rho.
template <std::size_t N>
double relative_entropy(const DensityMatrix<N>& sigma, const DensityMatrix<N>& rho) {
  const auto es = eigh(rho.matrix());
  double cross = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    double lambda = es.values[k];
    if (lambda < -tolerance::kNegative) throw NumericalError("relative entropy: rho is not positive");
    // <v_k| sigma |v_k>
    cplx w = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        w += std::conj(es.vectors(i, k)) * sigma(i, j) * es.vectors(j, k);
    const double weight = w.real();
    if (lambda <= tolerance::kEigenFloor) {
      if (weight > tolerance::kSupport) return kInfinity;
      lambda = tolerance::kEigenFloor;
    }
    cross -= weight * std::log(lambda);
  }
  return cross - von_neumann_entropy(sigma);
}

enum class TraceOut { Apparatus, System };

// Reduced state of a system (x) apparatus pair; `which` names the factor
// that is traced away.
inline Qubit partial_trace(const TwoQubit& rho, TraceOut which) {
  Matrix<2> out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        out(i, j) += which == TraceOut::Apparatus ? rho(i * 2 + k, j * 2 + k) : rho(k * 2 + i, k * 2 + j);
  return Qubit::normalized(out);
}

// Random states for property checks and the discord report: uniform in the
// Bloch ball for qubits, normalized G G^dagger with complex Gaussian G
// otherwise.
class StateSampler {
 public:
  StateSampler(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  Qubit bloch_ball() {
    const double u = rng_.uniform();
    const double cos_theta = 2.0 * rng_.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng_.uniform();
    const double r = std::cbrt(u);
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    return BlochVector{r * sin_theta * std::cos(phi), r * sin_theta * std::sin(phi), r * cos_theta}.to_density();
  }

  Qubit bloch_sphere() {
    const double cos_theta = 2.0 * rng_.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng_.uniform();
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    return BlochVector{sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta}.to_density();
  }

  template <std::size_t N>
  DensityMatrix<N> wishart() {
    Matrix<N> g;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) g(i, j) = cplx(rng_.normal(), rng_.normal());
    return DensityMatrix<N>::normalized(g * g.adjoint());
  }

  double uniform() { return rng_.uniform(); }

 private:
  CounterRng rng_;
};

}  // namespace qfilter
