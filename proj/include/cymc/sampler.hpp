#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cymc/kernels.hpp"
#include "cymc/schedule.hpp"
#include "cymc/targets.hpp"

namespace cymc {

/// Initial distribution: a point mass, an isotropic Gaussian, a uniform draw
/// from a box, or a direct draw from the target mixture.
struct InitSpec {
  enum class Kind { PointMass, Gaussian, UniformBox, MixtureDraw };
  Kind kind = Kind::Gaussian;
  Vector mean;         // point mass location / Gaussian mean
  double variance = 1; // Gaussian only
  Box box;             // UniformBox only
};

struct RunConfig {
  int cycles = 1; // K
  Schedule schedule;
  ProposalSpec proposal;
  InitSpec init;
  std::uint64_t seed = 0;
  int thinning = 0; // keep every thinning-th state in the trace; 0 disables

  void validate() const;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string rng_algorithm;
  std::string preset;
  double wall_seconds = 0.0;
};

struct RunOutput {
  std::vector<Vector> cycle_end_samples; // theta^(kL), k = 1..K
  std::array<long, 10> accepted_by_decile{};
  std::array<long, 10> proposed_by_decile{};
  std::vector<Vector> thinned_trace;
  RunMetadata metadata;

  /// Acceptance rate per beta decile ([0,0.1), ..., [0.9,1]); -1 where empty.
  std::array<double, 10> acceptance_by_phase() const;
};

/// Algorithm: draw theta^(0) ~ nu^(0), then K*L nonhomogeneous MH steps with
/// M_j targeting Pi^(beta(j/L)); collect the end-of-cycle states.
RunOutput run_cyclical(const RunConfig& config, const Target& target);

/// Same, continuing an existing random stream (for chaining runs).
RunOutput run_cyclical(const RunConfig& config, const Target& target, Rng& rng);

/// Restricted within-mode tail of a cycle: theta^(L2) = start, then restricted
/// MH steps for j = L2+1..L inside Theta_(region_index). The final state is the
/// last entry of the (full, unthinned) trace.
RunOutput run_within_mode(const RunConfig& config, const Target& target,
                          const ModeRegion& regions, int region_index, const Vector& start,
                          int start_step);

struct EscapeEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  int replicas = 0;
};

/// Fraction of independent continuations from `start` at step L2 that leave
/// Theta_(region_index) at any step in (L2, L], with binomial standard error.
/// Replica r uses the substream seed XOR r.
EscapeEstimate estimate_escape_probability(const RunConfig& config, const Target& target,
                                           const ModeRegion& regions, int region_index,
                                           const Vector& start, int start_step, int replicas);

/// Run `replicas` independent chains with per-replica substreams; outputs are
/// merged in replica order regardless of scheduling.
std::vector<RunOutput> run_replicas(const RunConfig& config, const Target& target, int replicas);

} // namespace cymc
