#pragma once

#include <span>
#include <vector>

#include "cymc/kernels.hpp"
#include "cymc/targets.hpp"

namespace cymc {

enum class Assignment { StrictBox, NearestCenter };

struct WeightReport {
  std::vector<long> counts;
  std::vector<double> weights; // count_i / total
  double unassigned = 0.0;     // fraction (strict-box only)
};

/// Empirical mixture weights from mode assignment of the samples.
WeightReport estimate_weights(std::span<const Vector> samples, const ModeRegion& regions,
                              Assignment assignment);

struct MarginalErrorEntry {
  double l1_error = 0.0; // sum_b |phat_b - p_b|, range [0, 2]
  long sample_count = 0;
  int bins = 0;
  bool low_count = false; // fewer than 50 in-mode samples
  std::vector<double> bin_centers;
  std::vector<double> estimated; // bin probabilities
  std::vector<double> truth;     // conditional bin masses of Pi given Theta_j
};

/// L1 error between the axis histogram of in-mode samples (nearest-center
/// assignment, clipped to the mode box) and the true conditional marginal of
/// Pi given Theta_j computed by quadrature over the box.
MarginalErrorEntry mode_marginal_error(std::span<const Vector> samples, const ModeRegion& regions,
                                       const Target& target, int mode_index, int axis, int bins);

/// Total variation in the sup_{|f|<=1} convention: sum_i |p_i - q_i|.
/// Note this is twice the half-L1 convention; range [0, 2].
double tv_discrete(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

} // namespace cymc
