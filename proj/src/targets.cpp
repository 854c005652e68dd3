#include "cymc/targets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cymc {

void Target::validate() const {
  if (dimension < 1) throw std::invalid_argument("target: dimension must be positive");
  if (components.empty()) throw std::invalid_argument("target: needs at least one component");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (c.weight <= 0.0) throw std::invalid_argument("target: component weight must be positive");
    if (c.variance <= 0.0) throw std::invalid_argument("target: component variance must be positive");
    if (c.mean.size() != dimension)
      throw std::invalid_argument("target: component mean dimension mismatch");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("target: component weights must sum to 1");
  if (domain) {
    if (domain->lower.size() != dimension || domain->upper.size() != dimension)
      throw std::invalid_argument("target: domain dimension mismatch");
    for (const auto& c : components)
      if (!domain->contains(c.mean))
        throw std::invalid_argument("target: component mean outside domain");
  }
}

double energy(const Target& target, const Vector& point) {
  if (point.size() != target.dimension)
    throw std::invalid_argument("energy: point dimension mismatch");
  const double d = static_cast<double>(target.dimension);
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(target.components.size());
  for (const auto& c : target.components) {
    double q = (point - c.mean).squaredNorm() / (2.0 * c.variance);
    double lg = std::log(c.weight) - 0.5 * d * std::log(2.0 * M_PI * c.variance) - q;
    logs.push_back(lg);
    max_log = std::max(max_log, lg);
  }
  double acc = 0.0;
  for (double lg : logs) acc += std::exp(lg - max_log);
  return -(max_log + std::log(acc));
}

double tempered_log_density(const Target& target, double beta, const Vector& point) {
  if (beta <= 0.0 || beta > 1.0)
    throw std::invalid_argument("tempered_log_density: beta must lie in (0, 1]");
  return -beta * energy(target, point);
}

namespace {

Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}

Box box1(double lo, double hi) {
  Box b;
  b.lower = vec1(lo);
  b.upper = vec1(hi);
  return b;
}

Target toy1d(double c) {
  Target t;
  t.dimension = 1;
  t.components = {{0.5, vec1(5.0), 1.0}, {0.5, vec1(-5.0), c * c}};
  t.domain = box1(-20.0, 20.0);
  t.validate();
  return t;
}

Target grid2d(bool equal_variance) {
  Target t;
  t.dimension = 2;
  const double axis[5] = {-4.0, -2.0, 0.0, 2.0, 4.0};
  // row-major, x varying fastest: component 25 has mean (4, 4)
  int i = 0;
  for (double y : axis) {
    for (double x : axis) {
      ++i;
      MixtureComponent comp;
      comp.weight = 1.0 / 25.0;
      comp.mean = Vector(2);
      comp.mean << x, y;
      comp.variance = equal_variance ? 0.2 : 0.2 / i;
      t.components.push_back(comp);
    }
  }
  Box b;
  b.lower = Vector(2);
  b.upper = Vector(2);
  b.lower << -8.0, -8.0;
  b.upper << 8.0, 8.0;
  t.domain = b;
  t.validate();
  return t;
}

} // namespace

Target build_preset(const std::string& name) {
  if (name == "toy1d-equal") return toy1d(1.0);
  if (name == "toy1d-unequal") return toy1d(0.1);
  if (name == "grid2d-equal") return grid2d(true);
  if (name == "grid2d-unequal") return grid2d(false);
  throw std::invalid_argument(
      "unknown preset '" + name +
      "'; valid: toy1d-equal, toy1d-unequal, grid2d-equal, grid2d-unequal");
}

Vector sample_mixture(Rng& rng, const Target& target) {
  double u = rng.uniform();
  double acc = 0.0;
  const MixtureComponent* chosen = &target.components.back();
  for (const auto& c : target.components) {
    acc += c.weight;
    if (u < acc) {
      chosen = &c;
      break;
    }
  }
  Vector p(target.dimension);
  double sd = std::sqrt(chosen->variance);
  for (int i = 0; i < target.dimension; ++i) p[i] = chosen->mean[i] + sd * rng.normal();
  return p;
}

} // namespace cymc
