#pragma once

// Effective quantum-point-contact detector: shot-noise floor, current
// contrast and the resulting measurement strength.
//
// Units are reduced: hbar = e = 1, so energies and angular frequencies share
// a scale, and R_K = h/e^2 = 2 pi.

#include <cmath>
#include <limits>
#include <numbers>

#include "qfilter/errors.hpp"

namespace qfilter::detector {

struct QpcParams {
  double transparency = 0.5;        // D
  double delta_transparency = 0.0;  // Delta D, D_L = D + dD, D_R = D - dD
  double bias = 1.0;                // e V_QPC
  double temperature = 0.0;         // k_B T
  double klitzing = 2.0 * std::numbers::pi;  // R_K
};

struct Currents {
  double left = 0.0;   // I_L
  double right = 0.0;  // I_R
  double delta = 0.0;  // I_L - I_R
  double mean = 0.0;   // (I_L + I_R) / 2
};

struct DetectorModel {
  double kappa = 0.0;
  double delta_current = 0.0;
  double noise_floor = 0.0;  // J(0)
  double mean_current = 0.0;

  // sqrt(8 kappa) written through the detector quantities.
  double record_gain() const { return delta_current / std::sqrt(2.0 * noise_floor); }
};

struct WeakResponseReport {
  double ratio = 0.0;           // |dI| / I0
  double electron_count = 0.0;  // (I0 / dI)^2, infinite when dI = 0
  double threshold = 0.0;
  bool weakly_responding = false;
};

inline constexpr double kWeakResponseThreshold = 0.1;

// J_I(omega) = (4/R_K) D(1-D) (eV - w) / [1 - exp(-(eV - w)/kT)].
inline double noise_spectral_density(double omega, const QpcParams& p) {
  if (!(p.transparency >= 0.0 && p.transparency <= 1.0)) throw ConfigError("transparency must lie in [0, 1]");
  if (!(p.temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
  if (!(p.klitzing > 0.0)) throw ConfigError("R_K must be positive");
  const double excess = p.bias - omega;
  if (!(excess > 0.0)) throw ConfigError("noise formula requires eV > hbar*omega");
  const double prefactor = 4.0 / p.klitzing * p.transparency * (1.0 - p.transparency);
  if (p.temperature == 0.0) return prefactor * excess;
  return prefactor * excess / -std::expm1(-excess / p.temperature);
}

// I_{L,R} = D_{L,R} e^2 V / (pi hbar).
inline Currents currents(const QpcParams& p) {
  const double dl = p.transparency + p.delta_transparency;
  const double dr = p.transparency - p.delta_transparency;
  if (!(dl >= 0.0 && dl <= 1.0 && dr >= 0.0 && dr <= 1.0))
    throw ConfigError("D +/- delta D must lie in [0, 1]");
  const double unit = p.bias / std::numbers::pi;
  Currents c;
  c.left = dl * unit;
  c.right = dr * unit;
  c.delta = c.left - c.right;
  c.mean = 0.5 * (c.left + c.right);
  return c;
}

// kappa = (dI)^2 / (16 J(0)).
inline double measurement_strength(double delta_current, double noise_floor) {
  if (!(noise_floor > 0.0)) throw ConfigError("J(0) must be positive");
  return delta_current * delta_current / (16.0 * noise_floor);
}

inline DetectorModel make_detector_model(const QpcParams& p) {
  const double dl = p.transparency + p.delta_transparency;
  const double dr = p.transparency - p.delta_transparency;
  if (!(dl > 0.0 && dl < 1.0 && dr > 0.0 && dr < 1.0)) throw ConfigError("D +/- delta D must lie in (0, 1)");
  if (!(p.bias > 0.0)) throw ConfigError("bias voltage must be positive");
  const Currents c = currents(p);
  DetectorModel m;
  m.delta_current = c.delta;
  m.mean_current = c.mean;
  m.noise_floor = noise_spectral_density(0.0, p);
  m.kappa = measurement_strength(c.delta, m.noise_floor);
  return m;
}

// Linear-regime diagnostic: reports, never enforces.
inline WeakResponseReport weak_response_check(const DetectorModel& m,
                                              double threshold = kWeakResponseThreshold) {
  if (m.mean_current == 0.0) throw ConfigError("mean current I0 is zero");
  WeakResponseReport r;
  r.threshold = threshold;
  r.ratio = std::abs(m.delta_current) / std::abs(m.mean_current);
  r.electron_count = m.delta_current == 0.0 ? std::numeric_limits<double>::infinity()
                                            : std::pow(m.mean_current / m.delta_current, 2);
  r.weakly_responding = r.ratio <= threshold;
  return r;
}

}  // namespace qfilter::detector
