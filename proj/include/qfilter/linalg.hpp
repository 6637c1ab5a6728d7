#pragma once

// Small fixed-size complex matrices and a Hermitian eigensolver.
//
// Everything here is sized at compile time (N = 2 for the qubit, N = 4 for
// the system-apparatus pair), so the storage is a flat std::array and all
// operations are value-semantic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qfilter {

using cplx = std::complex<double>;

template <std::size_t N>
class Matrix {
 public:
  static constexpr std::size_t dim = N;

  constexpr Matrix() : a_{} {}

  static constexpr Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static constexpr Matrix zero() { return Matrix{}; }

  static Matrix diagonal(const std::array<double, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  // Row-major initializer: Matrix<2>::from_rows({{a, b}, {c, d}}).
  static constexpr Matrix from_rows(const std::array<std::array<cplx, N>, N>& rows) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) m(i, j) = rows[i][j];
    return m;
  }

  constexpr cplx& operator()(std::size_t i, std::size_t j) { return a_[i * N + j]; }
  constexpr const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * N + j]; }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (auto& x : a_) x *= s;
    return *this;
  }
  Matrix& operator*=(double s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix l, const Matrix& r) { return l += r; }
  friend Matrix operator-(Matrix l, const Matrix& r) { return l -= r; }
  friend Matrix operator-(Matrix m) { return m *= -1.0; }
  friend Matrix operator*(Matrix m, double s) { return m *= s; }
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator*(Matrix m, cplx s) { return m *= s; }
  friend Matrix operator*(cplx s, Matrix m) { return m *= s; }

  friend Matrix operator*(const Matrix& l, const Matrix& r) {
    Matrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx lik = l(i, k);
        for (std::size_t j = 0; j < N; ++j) out(i, j) += lik * r(k, j);
      }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  Matrix adjoint() const {
    Matrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj((*this)(j, i));
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  // (M + M^dagger) / 2
  Matrix hermitian_part() const {
    Matrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return out;
  }

  const std::array<cplx, N * N>& data() const { return a_; }

 private:
  std::array<cplx, N * N> a_;
};

template <std::size_t N>
double max_abs_diff(const Matrix<N>& a, const Matrix<N>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

template <std::size_t N>
double max_abs(const Matrix<N>& a) {
  return max_abs_diff(a, Matrix<N>::zero());
}

// Largest |a(i,j) - conj(a(j,i))|.
template <std::size_t N>
double hermiticity_defect(const Matrix<N>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

// Tr(A B) without forming the product.
template <std::size_t N>
cplx trace_product(const Matrix<N>& a, const Matrix<N>& b) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) t += a(i, k) * b(k, i);
  return t;
}

template <std::size_t M, std::size_t N>
Matrix<M * N> kron(const Matrix<M>& a, const Matrix<N>& b) {
  Matrix<M * N> out;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l) out(i * N + k, j * N + l) = a(i, j) * b(k, l);
  return out;
}

namespace pauli {
// Basis order is (|L>, |R>): sigma_z = |L><L| - |R><R|.
inline const Matrix<2> I = Matrix<2>::identity();
inline const Matrix<2> X = Matrix<2>::from_rows({{{0.0, 1.0}, {1.0, 0.0}}});
inline const Matrix<2> Y = Matrix<2>::from_rows({{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}});
inline const Matrix<2> Z = Matrix<2>::from_rows({{{1.0, 0.0}, {0.0, -1.0}}});
}  // namespace pauli

// Eigenvalues ascending; column k of `vectors` is the eigenvector of values[k].
template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};
  Matrix<N> vectors;
};

// Cyclic complex Jacobi for Hermitian input. Each pivot is first made real by
// a diagonal phase and then annihilated by a real plane rotation, so a single
// rotation diagonalizes a 2x2 exactly.
template <std::size_t N>
EigenSystem<N> eigh(const Matrix<N>& input) {
  Matrix<N> a = input.hermitian_part();
  Matrix<N> v = Matrix<N>::identity();

  auto off_norm = [&a] {
    double s = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) s += std::norm(a(p, q));
    return s;
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) scale += std::norm(a(i, j));

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = off_norm();
    if (off == 0.0 || off <= 1e-32 * scale) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0 || mag <= 1e-18 * std::sqrt(scale)) {
          if (mag != 0.0) {
            a(p, q) = 0.0;
            a(q, p) = 0.0;
          }
          continue;
        }
        const cplx phase = a(p, q) / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // J acts on columns p, q: col_p' = c col_p - s conj(phase) col_q,
        //                         col_q' = s phase col_p + c col_q.
        const cplx jpp = c;
        const cplx jqp = -s * std::conj(phase);
        const cplx jpq = s * phase;
        const cplx jqq = c;

        // A <- A J
        for (std::size_t k = 0; k < N; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // A <- J^dagger A
        for (std::size_t k = 0; k < N; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < N; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::array<std::size_t, N> order{};
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&a](std::size_t l, std::size_t r) { return a(l, l).real() < a(r, r).real(); });

  EigenSystem<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < N; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// V diag(f(lambda)) V^dagger
template <std::size_t N, class F>
Matrix<N> apply_spectral(const EigenSystem<N>& es, F&& f) {
  Matrix<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    const double fk = f(es.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx vik = es.vectors(i, k) * fk;
      for (std::size_t j = 0; j < N; ++j) out(i, j) += vik * std::conj(es.vectors(j, k));
    }
  }
  return out;
}

template <std::size_t N>
Matrix<N> reconstruct(const EigenSystem<N>& es) {
  return apply_spectral(es, [](double x) { return x; });
}

// Smallest eigenvalue; closed form for the qubit, Jacobi otherwise.
template <std::size_t N>
double min_eigenvalue(const Matrix<N>& m) {
  if constexpr (N == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    const double half = 0.5 * (a - d);
    return 0.5 * (a + d) - std::sqrt(half * half + std::norm(b));
  } else {
    return eigh(m).values[0];
  }
}

}  // namespace qfilter
