#pragma once

#include <cmath>
#include <stdexcept>

namespace cymc {

/// Cyclical tempering schedule beta(t) = (1 + cos(2 pi t^r)) / 2, extended
/// with period 1 and clamped from below at `floor_value`.
///
/// floor_value = 1 degenerates to the constant schedule beta == 1, and
/// floor_value = 0 gives the unfloored schedule used by the spectral lab.
struct Schedule {
  int cycle_length = 1;      // L
  double power = 1.0;        // r >= 1
  double floor_value = 1e-3; // in [0, 1]

  void validate() const {
    if (cycle_length < 1) throw std::invalid_argument("schedule: cycle_length must be >= 1");
    if (power < 1.0) throw std::invalid_argument("schedule: power must be >= 1");
    if (floor_value < 0.0 || floor_value > 1.0)
      throw std::invalid_argument("schedule: floor must lie in [0, 1]");
  }
};

/// Value of the periodic schedule at real t >= 0. Integer t returns exactly 1
/// so the end-of-cycle kernel targets the untempered density.
inline double beta_at(const Schedule& s, double t) {
  if (t < 0.0) throw std::invalid_argument("beta_at: t must be >= 0");
  double frac = t - std::floor(t);
  if (frac == 0.0) return 1.0;
  double raw = 0.5 * (1.0 + std::cos(2.0 * M_PI * std::pow(frac, s.power)));
  return std::max(raw, s.floor_value);
}

/// beta at step j, i.e. beta(j / L), evaluated through the periodic extension
/// without accumulating floating-point drift in t.
inline double beta_step(const Schedule& s, long j) {
  long i = j % s.cycle_length;
  if (i == 0) return 1.0;
  return beta_at(s, static_cast<double>(i) / s.cycle_length);
}

struct BetaDerivative {
  double value = 0.0; // derivative of the unfloored schedule
  bool floored = false; // t lies where the clamp is active (floored derivative is 0)
};

/// Analytic derivative of the unfloored schedule on (0, 1):
///   d/dt beta(t) = -pi r t^(r-1) sin(2 pi t^r).
inline BetaDerivative beta_derivative(const Schedule& s, double t) {
  if (t <= 0.0 || t >= 1.0) throw std::invalid_argument("beta_derivative: t must lie in (0, 1)");
  double tr = std::pow(t, s.power);
  BetaDerivative d;
  d.value = -M_PI * s.power * std::pow(t, s.power - 1.0) * std::sin(2.0 * M_PI * tr);
  double raw = 0.5 * (1.0 + std::cos(2.0 * M_PI * tr));
  d.floored = raw < s.floor_value;
  return d;
}

} // namespace cymc
