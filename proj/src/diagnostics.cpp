#include "cymc/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cymc/quadrature.hpp"

namespace cymc {

WeightReport estimate_weights(std::span<const Vector> samples, const ModeRegion& regions,
                              Assignment assignment) {
  if (samples.empty()) throw std::invalid_argument("estimate_weights: empty sample list");
  const std::size_t d = regions.boxes.size();
  WeightReport report;
  report.counts.assign(d, 0);
  long unassigned = 0;
  for (const Vector& s : samples) {
    if (assignment == Assignment::StrictBox) {
      bool hit = false;
      for (std::size_t j = 0; j < d; ++j)
        if (regions.boxes[j].contains(s)) {
          ++report.counts[j];
          hit = true;
          break;
        }
      if (!hit) ++unassigned;
    } else {
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < d; ++j) {
        double dist = (s - regions.boxes[j].center()).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      ++report.counts[best];
    }
  }
  const double n = static_cast<double>(samples.size());
  report.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) report.weights[j] = report.counts[j] / n;
  report.unassigned = unassigned / n;
  return report;
}

MarginalErrorEntry mode_marginal_error(std::span<const Vector> samples, const ModeRegion& regions,
                                       const Target& target, int mode_index, int axis, int bins) {
  if (axis < 0 || axis >= target.dimension)
    throw std::invalid_argument("mode_marginal_error: axis out of range");
  if (bins < 1) throw std::invalid_argument("mode_marginal_error: bins must be >= 1");
  const Box& box = regions.boxes.at(mode_index);

  MarginalErrorEntry entry;
  entry.bins = bins;
  const double lo = box.lower[axis], hi = box.upper[axis];
  const double width = (hi - lo) / bins;

  // histogram of in-mode samples (nearest-center assignment)
  std::vector<long> counts(bins, 0);
  for (const Vector& s : samples) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < regions.boxes.size(); ++j) {
      double dist = (s - regions.boxes[j].center()).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (static_cast<int>(best) != mode_index) continue;
    double v = std::min(std::max(s[axis], lo), hi);
    int b = std::min(static_cast<int>((v - lo) / width), bins - 1);
    ++counts[b];
    ++entry.sample_count;
  }
  entry.low_count = entry.sample_count < 50;

  // true conditional bin masses of Pi given Theta_j, by quadrature
  auto density_1d = [&](double x) { // marginal of Pi along `axis` over the box
    if (target.dimension == 1) {
      Vector p(1);
      p << x;
      return std::exp(-energy(target, p));
    }
    // integrate the other axes over the box (tensor GL per axis; dim <= 2 here)
    int other = 1 - axis;
    return gl_integrate(
        [&](double y) {
          Vector p(2);
          p[axis] = x;
          p[other] = y;
          return std::exp(-energy(target, p));
        },
        box.lower[other], box.upper[other], 64);
  };

  entry.truth.resize(bins);
  entry.estimated.resize(bins);
  entry.bin_centers.resize(bins);
  double total_mass = 0.0;
  for (int b = 0; b < bins; ++b) {
    double a = lo + b * width;
    entry.bin_centers[b] = a + 0.5 * width;
    entry.truth[b] = gl_integrate(density_1d, a, a + width, 32);
    total_mass += entry.truth[b];
  }
  for (int b = 0; b < bins; ++b) {
    entry.truth[b] /= total_mass;
    entry.estimated[b] =
        entry.sample_count > 0 ? static_cast<double>(counts[b]) / entry.sample_count : 0.0;
    entry.l1_error += std::abs(entry.estimated[b] - entry.truth[b]);
  }
  return entry;
}

double tv_discrete(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_discrete: length mismatch");
  if (p.minCoeff() < 0.0 || q.minCoeff() < 0.0)
    throw std::invalid_argument("tv_discrete: probabilities must be non-negative");
  if (std::abs(p.sum() - 1.0) > 1e-9 || std::abs(q.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("tv_discrete: inputs must sum to 1");
  return (p - q).cwiseAbs().sum();
}

} // namespace cymc
