#include <doctest.h>

#include <cmath>

#include "cymc/spectral.hpp"

using namespace cymc;

namespace {

// Two-state chain with energies (0, log 2) and a single kernel step from
// temperature bprev to bcur; both proposal windows have one neighbor.
FiniteChain two_state(double bprev, double bcur) {
  FiniteChain chain;
  chain.grid = Eigen::VectorXd::LinSpaced(2, 0.0, 1.0);
  chain.neighbor_window = 1;
  chain.energies.resize(2);
  chain.energies << 0.0, std::log(2.0);
  chain.betas.resize(2);
  chain.betas << bprev, bcur;
  chain.pi.resize(2);
  chain.log_normalizers.resize(2);
  for (int j = 0; j < 2; ++j) {
    double w1 = std::exp(-chain.betas[j] * std::log(2.0));
    chain.log_normalizers[j] = std::log(1.0 + w1);
    Eigen::VectorXd p(2);
    p << 1.0 / (1.0 + w1), w1 / (1.0 + w1);
    chain.pi[j] = p;
  }
  const Eigen::VectorXd& p = chain.pi[1];
  Matrix M(2, 2);
  M(0, 1) = std::min(1.0, p[1] / p[0]);
  M(1, 0) = std::min(1.0, p[0] / p[1]);
  M(0, 0) = 1.0 - M(0, 1);
  M(1, 1) = 1.0 - M(1, 0);
  chain.kernels = {M};
  return chain;
}

// Equal-temperature chain whose kernel jumps straight to the target:
// M(x, .) = pi for every x.
FiniteChain independence_chain() {
  FiniteChain chain;
  const int n = 4;
  chain.grid = Eigen::VectorXd::LinSpaced(n, 0.0, 3.0);
  chain.neighbor_window = n - 1;
  Eigen::VectorXd pi(n);
  pi << 0.1, 0.2, 0.3, 0.4;
  chain.energies = -pi.array().log();
  chain.betas.resize(2);
  chain.betas << 1.0, 1.0;
  chain.pi = {pi, pi};
  chain.log_normalizers.resize(2);
  chain.log_normalizers << 0.0, 0.0;
  Matrix M(n, n);
  for (int x = 0; x < n; ++x) M.row(x) = pi.transpose();
  chain.kernels = {M};
  return chain;
}

FiniteChain toy_chain(int L = 64, int m = 5, double floor_value = 1e-3) {
  return discretize(build_preset("toy1d-equal"), -10.0, 10.0, 50, m,
                    Schedule{L, 1.0, floor_value});
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("two-state oracle: heating step 0.5 -> 1") {
  FiniteChain chain = two_state(0.5, 1.0);
  CHECK(chain.kernels[0](0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(chain.kernels[0](1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(alpha_j(chain, 1) == doctest::Approx(0.18198051533946397).epsilon(1e-9));
  CHECK(lambda_j(chain, 1) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("two-state oracle: cooling step 1 -> 0.5") {
  FiniteChain chain = two_state(1.0, 0.5);
  CHECK(chain.kernels[0](0, 1) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(alpha_j(chain, 1) == doctest::Approx(0.17851130197757925).epsilon(1e-9));
  CHECK(lambda_j(chain, 1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("independence kernel at equal temperature has gap exactly 1") {
  FiniteChain chain = independence_chain();
  CHECK(alpha_j(chain, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lambda_j(chain, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discretized kernels are stochastic and in detailed balance") {
  FiniteChain chain = toy_chain();
  const int N = chain.size();
  for (int j : {1, 16, 32, 48, 64}) {
    const Matrix& M = chain.kernels[j - 1];
    const Eigen::VectorXd& pij = chain.pi[j];
    for (int x = 0; x < N; ++x) {
      CHECK(M.row(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(M.row(x).minCoeff() >= 0.0);
    }
    for (int x = 0; x < N; ++x)
      for (int z = x + 1; z < N; ++z)
        CHECK(pij[x] * M(x, z) == doctest::Approx(pij[z] * M(z, x)).epsilon(1e-12));
  }
}

TEST_CASE("adjoint identity, positivity and the gap bound") {
  FiniteChain chain = toy_chain();
  for (int j : {1, 10, 33, 64}) {
    Matrix Q = q_matrix(chain, j);
    CHECK(Q.minCoeff() >= -1e-15);
    // rows of Q sum to the mass-transfer of pi_{j-1} through M^2 over pi_j
    Matrix W = chain.pi[j - 1].asDiagonal() * Q;
    CHECK((W - W.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Matrix Wbar = chain.pi[j - 1].asDiagonal() * adjoint_kernel(chain, j);
    CHECK((Wbar - Wbar.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(lambda_j(chain, j) <= 1.0 + alpha_j(chain, j) + 1e-10);
  }
  CHECK_THROWS_AS(q_matrix(chain, 0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_j(chain, 65), std::invalid_argument);
}

TEST_CASE("capital lambda closed form for a two-step cycle") {
  double alpha[] = {0.1, 0.2};
  double lambda[] = {0.3, 0.4};
  double expect = 0.1 * (1.0 - 0.4 + 0.2) + 0.2;
  CHECK(capital_lambda(alpha, lambda) == doctest::Approx(expect).epsilon(1e-15));
  double nothing[] = {0.0, 0.0};
  double gaps[] = {0.5, 0.5};
  CHECK(capital_lambda(nothing, gaps) == 0.0);
}

TEST_CASE("exact propagation preserves probability and detects stationarity") {
  FiniteChain chain = toy_chain(16);
  Trajectory traj = propagate_exact(chain, chain.pi[0], 1);
  CHECK(traj.var[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(traj.tv[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& nu : traj.nu) {
    CHECK(nu.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nu.minCoeff() >= -1e-15);
  }
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(chain.size(), 1.0);
  CHECK_THROWS_AS(propagate_exact(chain, bad, 1), std::invalid_argument);
}

TEST_CASE("theorem-1 recursion and Cauchy-Schwarz link hold on the toy chain") {
  FiniteChain chain = toy_chain();
  Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  Theorem1Report report = verify_theorem1(chain, nu0, 2);
  CHECK(report.recursion_ok);
  CHECK(report.cauchy_schwarz_ok);
  CHECK(report.min_recursion_slack >= -1e-10);
  // the unrolled bound dominates the exact variance everywhere
  for (std::size_t t = 0; t < report.unrolled_bound.size(); ++t)
    CHECK(report.trajectory.var[t] <= report.unrolled_bound[t] + 1e-10);
  CHECK(report.stated_bound.size() == 3);
}

TEST_CASE("path-sampling residual vanishes under quadrature refinement") {
  FiniteChain chain = toy_chain();
  for (int j = 1; j <= chain.cycle_length(); ++j)
    CHECK(check_path_sampling(chain, j, 32) < 1e-12);
  // a 2-point rule is visibly worse where the schedule moves fast
  double coarse = check_path_sampling(chain, 19, 2);
  CHECK(coarse > 1e-9);
  CHECK(check_path_sampling(chain, 19, 32) < coarse);
}

TEST_CASE("theorem-2 report on a partition is internally consistent") {
  FiniteChain chain = toy_chain(16);
  // partition the grid into two halves with the inner sets equal to them
  GridRegions regions = GridRegions::from_intervals(
      chain, {{-10.0, -0.1}, {0.1, 10.0}}, {{-10.0, -0.1}, {0.1, 10.0}});
  Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  Theorem2Report report = verify_theorem2(chain, regions, 8, nu0);
  CHECK(report.ok);
  CHECK(report.slack >= -1e-10);
  CHECK(report.remainder == doctest::Approx(0.0).epsilon(1e-12)); // inner sets cover everything
  CHECK(report.inner_mass.size() == 2);
}

TEST_CASE("theorem-2 validation rejects overlapping or escaping regions") {
  FiniteChain chain = toy_chain(16);
  Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  GridRegions overlap = GridRegions::from_intervals(
      chain, {{-10.0, 0.0}, {-1.0, 10.0}}, {{-9.0, -1.0}, {1.0, 9.0}});
  CHECK_THROWS_AS(verify_theorem2(chain, overlap, 8, nu0), std::invalid_argument);
  GridRegions outside = GridRegions::from_intervals(
      chain, {{-10.0, -1.0}, {1.0, 10.0}}, {{-9.0, -2.0}, {-0.5, 9.0}});
  CHECK_THROWS_AS(verify_theorem2(chain, outside, 8, nu0), std::invalid_argument);
  CHECK_THROWS_AS(verify_theorem2(chain, overlap, 16, nu0), std::invalid_argument);
}

TEST_CASE("restricted kernels are stochastic with the restricted target fixed") {
  FiniteChain chain = toy_chain(16);
  GridRegions regions =
      GridRegions::from_intervals(chain, {{2.0, 8.0}}, {{4.0, 6.0}});
  const auto& set = regions.theta_sets[0];
  Matrix R = restrict_kernel(chain, 16, set); // beta = 1 kernel
  for (int a = 0; a < R.rows(); ++a) {
    CHECK(R.row(a).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(R.row(a).minCoeff() >= 0.0);
  }
  Eigen::VectorXd pr = restricted_pi(chain, set);
  CHECK(pr.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // pi restricted is stationary for the restricted beta = 1 kernel
  Eigen::VectorXd pushed = R.transpose() * pr;
  CHECK((pushed - pr).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("drift fitting and the union bound") {
  CHECK_THROWS_AS(drift_union_bound(0.0, 1.0, 1.0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(drift_union_bound(0.5, -1.0, 1.0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(drift_union_bound(0.5, 1.0, 0.0, 4, 1.0), std::invalid_argument);
  DriftBounds b = drift_union_bound(0.5, 2.0, 3.0, 10, 7.0);
  CHECK(b.delta1_bound == doctest::Approx(10.0 * 4.0 * std::exp(-3.0)).epsilon(1e-14));
  CHECK(b.remainder_bound == doctest::Approx(std::exp(-3.0) * 11.0).epsilon(1e-14));

  FiniteChain chain = toy_chain(16);
  GridRegions regions = GridRegions::from_intervals(chain, {{2.0, 8.0}}, {{4.0, 6.0}});
  Eigen::VectorXd lyap = (2.0 * (chain.grid.array() - 5.0).abs()).exp().matrix();
  DriftFit fit = fit_drift_constants(chain, regions.theta_sets[0], 8, lyap);
  CHECK(fit.valid);
  // the fitted pair really satisfies the one-step drift inequality on the set
  for (int i = 9; i <= 16; ++i) {
    Eigen::VectorXd mv = chain.kernels[i - 1] * lyap;
    for (int x : regions.theta_sets[0])
      CHECK(mv[x] <= (1.0 - fit.alpha) * lyap[x] + fit.beta + 1e-10);
  }
  Eigen::VectorXd small = Eigen::VectorXd::Constant(chain.size(), 0.5);
  CHECK_THROWS_AS(fit_drift_constants(chain, regions.theta_sets[0], 8, small),
                  std::invalid_argument);
}

TEST_CASE("lyapunov check: zero-width proposal reduces to the identity kernel") {
  std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  LyapunovCheck check = check_lyapunov_lemma(0.01, 0.0, 1.0, 0.05, grid);
  CHECK(check.quadrature_converged);
  // KV = V, so the violation is 0.3 V(theta) minus the indicator at 0
  double expect = 0.3 * std::exp(0.05 / 0.01);
  CHECK(check.max_violation == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(check.argmax_theta) == doctest::Approx(1.0));
  CHECK_THROWS_AS(check_lyapunov_lemma(-1.0, 1.0, 1.0, 0.05, grid), std::invalid_argument);
}

TEST_CASE("proposition-1 scaling rows carry finite constants") {
  auto rows = verify_prop1_scaling(build_preset("toy1d-equal"), -10.0, 10.0, 30, 3,
                                   std::array<int, 2>{16, 32}, 1.0);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.max_alpha > 0.0);
    CHECK(r.max_normalized > 0.0);
    CHECK(r.max_normalized <= r.constant_bound);
  }
  CHECK(rows[1].max_alpha < rows[0].max_alpha); // alpha shrinks as L grows
}

} // TEST_SUITE
