#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cymc/schedule.hpp"
#include "cymc/targets.hpp"

namespace cymc {

using Matrix = Eigen::MatrixXd;

/// Exact finite-state realization of one tempering cycle: grid points x_i,
/// tempered probability vectors Pi_0..Pi_L and reversible MH matrices M_1..M_L
/// with uniform proposals over the 2m nearest neighbors (window clipped at the
/// boundary, Hastings-corrected so detailed balance holds exactly).
struct FiniteChain {
  Eigen::VectorXd grid;
  int neighbor_window = 1; // m
  Eigen::VectorXd energies;
  Eigen::VectorXd betas; // beta_0..beta_L
  Eigen::VectorXd log_normalizers;      // log Z_j, j = 0..L
  std::vector<Eigen::VectorXd> pi;      // Pi_0..Pi_L
  std::vector<Matrix> kernels;          // M_1..M_L at index j-1
  bool interval_covers_a_mode = true;   // warning flag from discretize

  int size() const { return static_cast<int>(grid.size()); }
  int cycle_length() const { return static_cast<int>(kernels.size()); }
};

FiniteChain discretize(const Target& target, double lo, double hi, int N, int m,
                       const Schedule& schedule);

/// Two-step kernel with density-ratio weighted columns:
/// Q_j(x,z) = (M_j^2)(x,z) * Pi_{j-1}(z) / Pi_j(z).
Matrix q_matrix(const FiniteChain& chain, int j);

/// Adjoint kernel Mbar_j(x,y) = M_j(x,y) * Pi_{j-1}(y) / Pi_j(y).
Matrix adjoint_kernel(const FiniteChain& chain, int j);

/// alpha_j = max_x sum_z (M_j^2)(x,z) |Pi_{j-1}(z)/Pi_j(z) - 1|
/// (the sup over Pi_{j-1}-unit-norm f is attained by a point mass).
double alpha_j(const FiniteChain& chain, int j);

/// Spectral gap of Q_j: smallest generalized eigenvalue of the Dirichlet form
/// of Q_j against the Pi_{j-1} variance form, on the mean-zero subspace.
double lambda_j(const FiniteChain& chain, int j);

/// Lambda_L = sum_{i=0}^L alpha_i prod_{l=i+1}^L (1 - lambda_l + alpha_l),
/// with alpha_0 = 0 and empty products equal to 1.
double capital_lambda(std::span<const double> alpha, std::span<const double> lambda);

struct SpectralSummary {
  std::vector<double> alpha;  // alpha_1..alpha_L
  std::vector<double> lambda; // lambda_1..lambda_L
  double capital_lambda = 0.0;
};
SpectralSummary analyze_cycle(const FiniteChain& chain);

struct Trajectory {
  std::vector<Eigen::VectorXd> nu; // nu^(0)..nu^(kL)
  std::vector<double> var;         // Var_j(f_j), f_j = nu^(j)/Pi_j
  std::vector<double> tv;          // ||nu^(j) - Pi_j||_tv (sup |f|<=1 convention)
};

/// Exact left-multiplication of nu0 through k cycles of the kernels.
Trajectory propagate_exact(const FiniteChain& chain, const Eigen::VectorXd& nu0, int k);

struct Theorem1Report {
  SpectralSummary spectral;
  Trajectory trajectory;
  std::vector<double> unrolled_bound;  // iterated variance bound, index 0..kL
  std::vector<double> recursion_slack; // (1-l+a)Var_{j-1} + a - Var_j, index 1..kL
  std::vector<double> stated_bound;    // Var_0 * Lambda_L^k at cycle ends (informational)
  double min_recursion_slack = 0.0;
  bool recursion_ok = false;      // per-step recursion holds (slack >= -1e-10)
  bool cauchy_schwarz_ok = false; // tv_j <= sqrt(Var_j) at every step
};
Theorem1Report verify_theorem1(const FiniteChain& chain, const Eigen::VectorXd& nu0, int k);

struct Prop1Row {
  int cycle_length = 0;
  double max_alpha = 0.0;
  double max_normalized = 0.0; // max_j alpha_j * L / sup |beta'| over the j-th interval
  double constant_bound = 0.0; // osc(E) * max_j exp(|beta_j - beta_{j-1}| osc(E))
};
std::vector<Prop1Row> verify_prop1_scaling(const Target& target, double lo, double hi, int N,
                                           int m, std::span<const int> cycle_lengths, double r);

/// Mode regions as grid index sets.
struct GridRegions {
  std::vector<std::vector<int>> theta_sets; // Theta_j
  std::vector<std::vector<int>> inner_sets; // I_j subset Theta_j

  static GridRegions from_intervals(const FiniteChain& chain,
                                    const std::vector<std::pair<double, double>>& theta,
                                    const std::vector<std::pair<double, double>>& inner);
};

struct Theorem2Report {
  double delta1 = 0.0;    // max escape probability from I_j over steps (L2, L]
  double delta2 = 0.0;    // max TV of the restricted chain at step L from Pi^(j)
  double lhs_tv = 0.0;    // ||nu^(L) - sum_j nu^(L2)(I_j) Pi^(j)||_tv
  double remainder = 0.0; // 1 - nu^(L2)(union I_j)
  double slack = 0.0;     // delta1 + delta2 + remainder - lhs_tv
  std::vector<double> inner_mass; // nu^(L2)(I_j)
  bool ok = false;
};
Theorem2Report verify_theorem2(const FiniteChain& chain, const GridRegions& regions, int L2,
                               const Eigen::VectorXd& nu0);

/// Restriction of M_j to the index set: off-diagonal entries of M_j on the
/// set, rejected mass folded into the diagonal.
Matrix restrict_kernel(const FiniteChain& chain, int j, const std::vector<int>& theta_set);

/// Pi restricted to the index set and renormalized (beta = 1 endpoint).
Eigen::VectorXd restricted_pi(const FiniteChain& chain, const std::vector<int>& theta_set);

/// |log(Z_{j-1}/Z_j) - (beta_j - beta_{j-1}) int_0^1 E_t dt| by Gauss-Legendre
/// quadrature over the interpolating tempered family.
double check_path_sampling(const FiniteChain& chain, int j, int quadrature_points);

struct LyapunovCheck {
  double max_violation = 0.0;
  double argmax_theta = 0.0;
  bool quadrature_converged = true;
};

/// Drift check for the MH kernel with target N(0, s c^2 sigma^2) and proposal
/// Unif([theta - s sigma, theta + s sigma]) against V(theta) = e^{(a/sigma)|theta|}:
/// max over the grid of (KV)(theta) - 0.7 V(theta) - e^{2sa} 1{|theta| <= s sigma}.
LyapunovCheck check_lyapunov_lemma(double sigma, double s, double c, double alpha_exp,
                                   std::span<const double> theta_grid);

struct DriftBounds {
  double delta1_bound = 0.0;    // steps * (beta/alpha) * e^{-m}
  double remainder_bound = 0.0; // e^{-m} (beta/alpha + E V(start))
};
DriftBounds drift_union_bound(double alpha_drift, double beta_drift, double m, int steps,
                              double ev_start);

struct DriftFit {
  double alpha = 0.0;
  double beta = 0.0;
  double m = 0.0;
  double ev_start = 1.0;
  bool valid = false;
};

/// Fit (alpha, beta) so that M_i V <= (1-alpha) V + beta holds exactly on the
/// grid for all i in (L2, L] and all points of the set, minimizing the
/// resulting union bound; m = log min V outside the set.
DriftFit fit_drift_constants(const FiniteChain& chain, const std::vector<int>& theta_set, int L2,
                             const Eigen::VectorXd& lyapunov);

} // namespace cymc
