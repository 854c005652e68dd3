#include "cymc/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cymc {

double ProposalSpec::scale_at(double beta) const {
  if (family == ProposalFamily::UniformWindow && fixed_halfwidth) return *fixed_halfwidth;
  return base_scale * std::pow(beta, -temperature_exponent);
}

void ModeRegion::validate() const {
  if (inner_sets.size() > boxes.size())
    throw std::invalid_argument("mode region: more inner sets than boxes");
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    for (std::size_t k = j + 1; k < boxes.size(); ++k) {
      bool overlap = true;
      for (Eigen::Index a = 0; a < boxes[j].lower.size(); ++a)
        if (boxes[j].upper[a] < boxes[k].lower[a] || boxes[k].upper[a] < boxes[j].lower[a])
          overlap = false;
      if (overlap) throw std::invalid_argument("mode region: boxes must be disjoint");
    }
  }
  for (std::size_t j = 0; j < inner_sets.size(); ++j)
    if (!boxes[j].contains(inner_sets[j].lower) || !boxes[j].contains(inner_sets[j].upper))
      throw std::invalid_argument("mode region: inner set not contained in its box");
}

namespace {
Box box1(double lo, double hi) {
  Box b;
  b.lower = Vector(1);
  b.upper = Vector(1);
  b.lower << lo;
  b.upper << hi;
  return b;
}
} // namespace

ModeRegion toy1d_mode_region() {
  ModeRegion r;
  r.boxes = {box1(2.0, 8.0), box1(-8.0, -2.0)};
  r.inner_sets = {box1(4.0, 6.0), box1(-6.0, -4.0)};
  r.validate();
  return r;
}

ModeRegion mode_region_from_means(const Target& target, double radius) {
  ModeRegion r;
  for (const auto& c : target.components) {
    Box b;
    b.lower = c.mean.array() - radius;
    b.upper = c.mean.array() + radius;
    r.boxes.push_back(b);
  }
  return r;
}

double accept_probability(const Target& target, double beta, const Vector& current,
                          const Vector& proposal) {
  if (target.domain && !target.domain->contains(proposal)) return 0.0;
  double delta = energy(target, proposal) - energy(target, current);
  if (delta <= 0.0) return 1.0;
  return std::exp(-beta * delta);
}

Vector propose(Rng& rng, const ProposalSpec& spec, double beta, const Vector& current) {
  Vector p(current.size());
  double s = spec.scale_at(beta);
  if (spec.family == ProposalFamily::GaussianIsotropic) {
    double sd = std::sqrt(s);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = current[i] + sd * rng.normal();
  } else {
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p[i] = current[i] + s * (2.0 * rng.uniform() - 1.0);
  }
  return p;
}

StepResult mh_step(Rng& rng, const Target& target, double beta, const ProposalSpec& spec,
                   const Vector& current) {
  if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("mh_step: beta must lie in (0, 1]");
  Vector prop = propose(rng, spec, beta, current);
  double a = accept_probability(target, beta, current, prop);
  // the acceptance uniform is always consumed so streams stay aligned
  // across parameter changes (common-random-numbers discipline)
  if (rng.uniform() < a) return {std::move(prop), true};
  return {current, false};
}

StepResult restricted_mh_step(Rng& rng, const Target& target, double beta,
                              const ProposalSpec& spec, int region_index,
                              const ModeRegion& regions, const Vector& current) {
  const Box& box = regions.boxes.at(region_index);
  if (!box.contains(current))
    throw std::invalid_argument("restricted_mh_step: current state outside the region");
  Vector prop = propose(rng, spec, beta, current);
  if (!box.contains(prop)) return {current, false}; // indicator zero
  double a = accept_probability(target, beta, current, prop);
  if (rng.uniform() < a) return {std::move(prop), true};
  return {current, false};
}

} // namespace cymc
