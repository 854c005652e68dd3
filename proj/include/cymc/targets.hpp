#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cymc/rng.hpp"

namespace cymc {

using Vector = Eigen::VectorXd;

/// Axis-aligned box.
struct Box {
  Vector lower;
  Vector upper;

  bool contains(const Vector& p) const {
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p[i] < lower[i] || p[i] > upper[i]) return false;
    return true;
  }
  Vector center() const { return 0.5 * (lower + upper); }
};

/// One isotropic Gaussian component of a mixture target.
struct MixtureComponent {
  double weight = 1.0;
  Vector mean;
  double variance = 1.0; // per axis, isotropic
};

/// Normalized Gaussian-mixture target: Pi(theta) = sum_i w_i f_i(theta) with
/// full normalizing constants, so exp(-energy) is the density itself (Z = 1).
struct Target {
  int dimension = 1;
  std::vector<MixtureComponent> components;
  std::optional<Box> domain;

  void validate() const;
};

/// E(theta) = -log sum_i w_i f_i(theta), evaluated by log-sum-exp.
double energy(const Target& target, const Vector& point);

/// Unnormalized tempered log density: -beta * E(theta).
double tempered_log_density(const Target& target, double beta, const Vector& point);

/// Named presets: toy1d-equal, toy1d-unequal, grid2d-equal, grid2d-unequal.
Target build_preset(const std::string& name);

/// Direct draw from the mixture (component by weight, then Gaussian).
Vector sample_mixture(Rng& rng, const Target& target);

} // namespace cymc
