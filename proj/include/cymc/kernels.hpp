#pragma once

#include <optional>
#include <vector>

#include "cymc/rng.hpp"
#include "cymc/targets.hpp"

namespace cymc {

enum class ProposalFamily { GaussianIsotropic, UniformWindow };

/// Symmetric random-walk proposal with temperature-dependent scale:
/// per-step variance (Gaussian) or half-width (uniform) is
/// base_scale * beta^(-temperature_exponent).
struct ProposalSpec {
  ProposalFamily family = ProposalFamily::GaussianIsotropic;
  double base_scale = 0.25;
  double temperature_exponent = 1.0; // q >= 0
  std::optional<double> fixed_halfwidth; // uniform-window override, ignores beta

  double scale_at(double beta) const;

  void validate() const {
    if (base_scale <= 0.0) throw std::invalid_argument("proposal: base scale must be positive");
    if (temperature_exponent < 0.0)
      throw std::invalid_argument("proposal: temperature exponent must be >= 0");
  }
};

/// Disjoint mode boxes Theta_1..Theta_d with inner sets I_j subset Theta_j.
struct ModeRegion {
  std::vector<Box> boxes;
  std::vector<Box> inner_sets;

  void validate() const;
};

/// Default two-mode regions for the toy1d targets: Theta_1 = [2, 8] around +5,
/// Theta_2 = [-8, -2] around -5, inner sets of half-width 1 around the modes.
ModeRegion toy1d_mode_region();

/// Boxes of the given radius around each component mean.
ModeRegion mode_region_from_means(const Target& target, double radius);

/// Metropolis acceptance for a symmetric proposal:
/// min(1, exp(-beta (E(proposal) - E(current)))), 0 outside the target domain.
double accept_probability(const Target& target, double beta, const Vector& current,
                          const Vector& proposal);

struct StepResult {
  Vector state;
  bool accepted = false;
};

/// Draw a symmetric proposal at the given temperature.
Vector propose(Rng& rng, const ProposalSpec& spec, double beta, const Vector& current);

/// One random-walk Metropolis step targeting Pi^beta.
StepResult mh_step(Rng& rng, const Target& target, double beta, const ProposalSpec& spec,
                   const Vector& current);

/// MH step for the restriction of the tempered density to Theta_(region_index):
/// proposals landing outside the box are rejected.
StepResult restricted_mh_step(Rng& rng, const Target& target, double beta,
                              const ProposalSpec& spec, int region_index,
                              const ModeRegion& regions, const Vector& current);

} // namespace cymc
