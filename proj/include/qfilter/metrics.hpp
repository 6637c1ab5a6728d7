#pragma once

// Confidence, backaction and epitome between the ideal (rho_I), real (rho_R)
// and estimated (rho_E) states.
//
//   C = D[rho_E, rho_R],  B = D[rho_I, rho_R],  E = D[rho_I, rho_E]
//
// With the fidelity measure D = 1 - F. With the relative entropy the
// ordering matters: C = S(rho_R||rho_E), B = S(rho_I||rho_R),
// E = S(rho_I||rho_E). The reverse ordering of B diverges whenever rho_I is
// pure and rho_R is not equal to it.

#include <cmath>
#include <cstddef>
#include <vector>

#include "qfilter/dynamics.hpp"
#include "qfilter/qstate.hpp"

namespace qfilter {

enum class Measure { Fidelity, RelativeEntropy };

inline double confidence(const Qubit& rho_e, const Qubit& rho_r, Measure m) {
  return m == Measure::Fidelity ? 1.0 - fidelity(rho_e, rho_r) : relative_entropy(rho_r, rho_e);
}

inline double backaction(const Qubit& rho_i, const Qubit& rho_r, Measure m) {
  return m == Measure::Fidelity ? 1.0 - fidelity(rho_i, rho_r) : relative_entropy(rho_i, rho_r);
}

inline double epitome(const Qubit& rho_i, const Qubit& rho_e, Measure m) {
  return m == Measure::Fidelity ? 1.0 - fidelity(rho_i, rho_e) : relative_entropy(rho_i, rho_e);
}

// Raw metric values per output time. Entropy entries may be +inf
// (support violation); `infinite()` exposes the mask.
struct MetricSeries {
  std::vector<double> times;
  std::vector<double> c_fid, b_fid, e_fid;
  std::vector<double> c_re, b_re, e_re;

  std::size_t size() const { return times.size(); }

  void resize(std::size_t n) {
    for (auto* v : columns()) v->assign(n, 0.0);
    times.assign(n, 0.0);
  }

  std::vector<std::vector<double>*> columns() { return {&c_fid, &b_fid, &e_fid, &c_re, &b_re, &e_re}; }

  static bool infinite(double v) { return std::isinf(v); }
};

struct MetricPoint {
  double c_fid, b_fid, e_fid, c_re, b_re, e_re;
};

inline MetricPoint evaluate_metrics(const Qubit& rho_i, const Qubit& rho_r, const Qubit& rho_e) {
  return {confidence(rho_e, rho_r, Measure::Fidelity),      backaction(rho_i, rho_r, Measure::Fidelity),
          epitome(rho_i, rho_e, Measure::Fidelity),         confidence(rho_e, rho_r, Measure::RelativeEntropy),
          backaction(rho_i, rho_r, Measure::RelativeEntropy), epitome(rho_i, rho_e, Measure::RelativeEntropy)};
}

inline MetricSeries compute_metrics(const std::vector<double>& times, const std::vector<Qubit>& rho_i,
                                    const std::vector<Qubit>& rho_r, const std::vector<Qubit>& rho_e) {
  MetricSeries s;
  s.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const MetricPoint p = evaluate_metrics(rho_i[k], rho_r[k], rho_e[k]);
    s.times[k] = times[k];
    s.c_fid[k] = p.c_fid;
    s.b_fid[k] = p.b_fid;
    s.e_fid[k] = p.e_fid;
    s.c_re[k] = p.c_re;
    s.b_re[k] = p.b_re;
    s.e_re[k] = p.e_re;
  }
  return s;
}

inline MetricSeries compute_metrics(const TrajectoryRecord& rec) {
  return compute_metrics(rec.times, rec.rho_i, rec.rho_r, rec.rho_e);
}

inline MetricSeries compute_metrics(const EnsembleFilterSeries& s) {
  return compute_metrics(s.times, s.rho_i, s.rho_r, s.rho_e);
}

}  // namespace qfilter
