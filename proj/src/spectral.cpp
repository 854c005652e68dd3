#include "cymc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cymc/quadrature.hpp"

namespace cymc {

namespace {

Eigen::VectorXd tempered_pi(const Eigen::VectorXd& energies, double beta, double& log_z) {
  Eigen::VectorXd logw = -beta * energies.array();
  double shift = logw.maxCoeff();
  Eigen::VectorXd w = (logw.array() - shift).exp();
  double total = w.sum();
  log_z = shift + std::log(total);
  return w / total;
}

void check_j(const FiniteChain& chain, int j) {
  if (j < 1 || j > chain.cycle_length())
    throw std::invalid_argument("spectral: kernel index j out of range");
}

} // namespace

FiniteChain discretize(const Target& target, double lo, double hi, int N, int m,
                       const Schedule& schedule) {
  if (N < 2) throw std::invalid_argument("discretize: N must be >= 2");
  if (m < 1 || m > N - 1) throw std::invalid_argument("discretize: need 1 <= m <= N-1");
  if (hi <= lo) throw std::invalid_argument("discretize: empty interval");
  schedule.validate();

  FiniteChain chain;
  chain.grid = Eigen::VectorXd::LinSpaced(N, lo, hi);
  chain.neighbor_window = m;
  chain.energies.resize(N);
  Vector p(1);
  for (int i = 0; i < N; ++i) {
    p[0] = chain.grid[i];
    chain.energies[i] = energy(target, p);
  }
  chain.interval_covers_a_mode = false;
  for (const auto& c : target.components)
    if (c.mean[0] >= lo && c.mean[0] <= hi) chain.interval_covers_a_mode = true;

  const int L = schedule.cycle_length;
  chain.pi.resize(L + 1);
  chain.log_normalizers.resize(L + 1);
  chain.betas.resize(L + 1);
  for (int j = 0; j <= L; ++j) {
    chain.betas[j] = beta_step(schedule, j);
    chain.pi[j] = tempered_pi(chain.energies, chain.betas[j], chain.log_normalizers[j]);
  }

  // proposal: uniform over the window i-m..i+m clipped to the grid; the
  // Hastings ratio accounts for the smaller windows at the edges
  auto window_size = [&](int i) {
    return std::min(i + m, N - 1) - std::max(i - m, 0);
  };
  chain.kernels.resize(L);
  for (int j = 1; j <= L; ++j) {
    const Eigen::VectorXd& pij = chain.pi[j];
    Matrix M = Matrix::Zero(N, N);
    for (int x = 0; x < N; ++x) {
      double qx = 1.0 / window_size(x);
      double stay = 1.0;
      for (int z = std::max(x - m, 0); z <= std::min(x + m, N - 1); ++z) {
        if (z == x) continue;
        double qz = 1.0 / window_size(z);
        double a = std::min(1.0, (pij[z] * qz) / (pij[x] * qx));
        M(x, z) = qx * a;
        stay -= M(x, z);
      }
      M(x, x) = stay;
    }
    chain.kernels[j - 1] = std::move(M);
  }
  return chain;
}

Matrix q_matrix(const FiniteChain& chain, int j) {
  check_j(chain, j);
  const Matrix& M = chain.kernels[j - 1];
  Eigen::VectorXd ratio = chain.pi[j - 1].cwiseQuotient(chain.pi[j]);
  return (M * M) * ratio.asDiagonal();
}

Matrix adjoint_kernel(const FiniteChain& chain, int j) {
  check_j(chain, j);
  Eigen::VectorXd ratio = chain.pi[j - 1].cwiseQuotient(chain.pi[j]);
  return chain.kernels[j - 1] * ratio.asDiagonal();
}

double alpha_j(const FiniteChain& chain, int j) {
  check_j(chain, j);
  const Matrix& M = chain.kernels[j - 1];
  Eigen::VectorXd dev = (chain.pi[j - 1].cwiseQuotient(chain.pi[j]).array() - 1.0).abs();
  return ((M * M) * dev).maxCoeff();
}

double lambda_j(const FiniteChain& chain, int j) {
  check_j(chain, j);
  const int N = chain.size();
  if (N < 2) throw std::invalid_argument("lambda_j: need at least two states");
  const Eigen::VectorXd& pim1 = chain.pi[j - 1];

  Matrix W = pim1.asDiagonal() * q_matrix(chain, j);
  W = 0.5 * (W + W.transpose()).eval(); // symmetric up to roundoff by the adjoint identity

  // Dirichlet form of Q_j in the sqrt(Pi_{j-1})-weighted coordinates
  Eigen::VectorXd d = pim1.cwiseSqrt();
  Eigen::VectorXd row_sums = W.rowwise().sum();
  Matrix B = (row_sums.asDiagonal().toDenseMatrix() - W);
  B = d.cwiseInverse().asDiagonal() * B * d.cwiseInverse().asDiagonal();

  // orthonormal basis of the Pi_{j-1}-mean-zero subspace via the Householder
  // reflection mapping e_0 to u = sqrt(Pi_{j-1})
  Eigen::VectorXd v = d;
  v[0] -= 1.0;
  Matrix H = Matrix::Identity(N, N);
  double vn = v.squaredNorm();
  if (vn > 1e-28) H -= (2.0 / vn) * (v * v.transpose());
  Matrix V = H.rightCols(N - 1);

  Matrix A = V.transpose() * B * V;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (A + A.transpose()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double capital_lambda(std::span<const double> alpha, std::span<const double> lambda) {
  if (alpha.size() != lambda.size())
    throw std::invalid_argument("capital_lambda: alpha/lambda size mismatch");
  const int L = static_cast<int>(alpha.size());
  double sum = 0.0, tail_product = 1.0;
  for (int i = L; i >= 1; --i) {
    sum += alpha[i - 1] * tail_product;
    tail_product *= 1.0 - lambda[i - 1] + alpha[i - 1];
  }
  return sum; // alpha_0 = 0 contributes nothing
}

SpectralSummary analyze_cycle(const FiniteChain& chain) {
  SpectralSummary s;
  const int L = chain.cycle_length();
  s.alpha.resize(L);
  s.lambda.resize(L);
  for (int j = 1; j <= L; ++j) {
    s.alpha[j - 1] = alpha_j(chain, j);
    s.lambda[j - 1] = lambda_j(chain, j);
  }
  s.capital_lambda = capital_lambda(s.alpha, s.lambda);
  return s;
}

Trajectory propagate_exact(const FiniteChain& chain, const Eigen::VectorXd& nu0, int k) {
  if (nu0.size() != chain.size())
    throw std::invalid_argument("propagate_exact: nu0 size mismatch");
  if (std::abs(nu0.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("propagate_exact: nu0 must sum to 1");
  const int L = chain.cycle_length();
  const long total = static_cast<long>(k) * L;

  Trajectory traj;
  traj.nu.reserve(total + 1);
  traj.var.reserve(total + 1);
  traj.tv.reserve(total + 1);

  auto record = [&](const Eigen::VectorXd& nu, int pi_index) {
    const Eigen::VectorXd& pij = chain.pi[pi_index];
    double var = nu.array().square().cwiseQuotient(pij.array()).sum() - 1.0;
    traj.var.push_back(var);
    traj.tv.push_back((nu - pij).cwiseAbs().sum());
    traj.nu.push_back(nu);
  };

  Eigen::VectorXd nu = nu0;
  record(nu, 0);
  for (long t = 1; t <= total; ++t) {
    int j = static_cast<int>((t - 1) % L) + 1;
    nu = (chain.kernels[j - 1].transpose() * nu).eval();
    record(nu, j);
  }
  return traj;
}

Theorem1Report verify_theorem1(const FiniteChain& chain, const Eigen::VectorXd& nu0, int k) {
  Theorem1Report report;
  report.spectral = analyze_cycle(chain);
  report.trajectory = propagate_exact(chain, nu0, k);
  const int L = chain.cycle_length();
  const long total = static_cast<long>(k) * L;

  report.unrolled_bound.resize(total + 1);
  report.recursion_slack.resize(total);
  report.unrolled_bound[0] = report.trajectory.var[0];
  report.recursion_ok = true;
  report.cauchy_schwarz_ok = true;
  report.min_recursion_slack = std::numeric_limits<double>::infinity();
  for (long t = 1; t <= total; ++t) {
    int j = static_cast<int>((t - 1) % L) + 1;
    double a = report.spectral.alpha[j - 1];
    double l = report.spectral.lambda[j - 1];
    double coef = 1.0 - l + a;
    double slack = coef * report.trajectory.var[t - 1] + a - report.trajectory.var[t];
    report.recursion_slack[t - 1] = slack;
    report.min_recursion_slack = std::min(report.min_recursion_slack, slack);
    if (slack < -1e-10) report.recursion_ok = false;
    report.unrolled_bound[t] = coef * report.unrolled_bound[t - 1] + a;
    if (report.trajectory.tv[t] > std::sqrt(std::max(report.trajectory.var[t], 0.0)) + 1e-10)
      report.cauchy_schwarz_ok = false;
  }
  if (report.trajectory.tv[0] >
      std::sqrt(std::max(report.trajectory.var[0], 0.0)) + 1e-10)
    report.cauchy_schwarz_ok = false;

  report.stated_bound.resize(k + 1);
  double var0 = report.trajectory.var[0];
  report.stated_bound[0] = var0;
  for (int c = 1; c <= k; ++c)
    report.stated_bound[c] = report.stated_bound[c - 1] * report.spectral.capital_lambda;
  return report;
}

std::vector<Prop1Row> verify_prop1_scaling(const Target& target, double lo, double hi, int N,
                                           int m, std::span<const int> cycle_lengths, double r) {
  std::vector<Prop1Row> rows;
  for (int L : cycle_lengths) {
    Schedule schedule{L, r, 0.0}; // unfloored
    FiniteChain chain = discretize(target, lo, hi, N, m, schedule);
    double osc = chain.energies.maxCoeff() - chain.energies.minCoeff();

    Prop1Row row;
    row.cycle_length = L;
    double max_exp = 0.0;
    for (int j = 1; j <= L; ++j) {
      double a = alpha_j(chain, j);
      row.max_alpha = std::max(row.max_alpha, a);

      // sup of the analytic |beta'| over [(j-1)/L, j/L], by dense sampling
      double t0 = (j - 1.0) / L, t1 = static_cast<double>(j) / L;
      double sup = 0.0;
      for (int s = 0; s <= 400; ++s) {
        double t = t0 + (t1 - t0) * s / 400.0;
        t = std::clamp(t, 1e-12, 1.0 - 1e-12);
        sup = std::max(sup, std::abs(beta_derivative(schedule, t).value));
      }
      if (sup > 0.0) row.max_normalized = std::max(row.max_normalized, a * L / sup);

      double dbeta = std::abs(beta_step(schedule, j) - beta_step(schedule, j - 1));
      max_exp = std::max(max_exp, std::exp(dbeta * osc));
    }
    row.constant_bound = osc * max_exp;
    rows.push_back(row);
  }
  return rows;
}

GridRegions GridRegions::from_intervals(const FiniteChain& chain,
                                        const std::vector<std::pair<double, double>>& theta,
                                        const std::vector<std::pair<double, double>>& inner) {
  GridRegions regions;
  auto collect = [&](const std::pair<double, double>& iv) {
    std::vector<int> idx;
    for (int i = 0; i < chain.size(); ++i)
      if (chain.grid[i] >= iv.first && chain.grid[i] <= iv.second) idx.push_back(i);
    return idx;
  };
  for (const auto& iv : theta) regions.theta_sets.push_back(collect(iv));
  for (const auto& iv : inner) regions.inner_sets.push_back(collect(iv));
  return regions;
}

Matrix restrict_kernel(const FiniteChain& chain, int j, const std::vector<int>& theta_set) {
  check_j(chain, j);
  const Matrix& M = chain.kernels[j - 1];
  const int n = static_cast<int>(theta_set.size());
  Matrix R(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) R(a, b) = M(theta_set[a], theta_set[b]);
  for (int a = 0; a < n; ++a) {
    double off = R.row(a).sum() - R(a, a);
    R(a, a) = 1.0 - off; // proposals leaving the set are rejected
  }
  return R;
}

Eigen::VectorXd restricted_pi(const FiniteChain& chain, const std::vector<int>& theta_set) {
  Eigen::VectorXd p(theta_set.size());
  const Eigen::VectorXd& full = chain.pi.back();
  for (std::size_t a = 0; a < theta_set.size(); ++a) p[a] = full[theta_set[a]];
  return p / p.sum();
}

Theorem2Report verify_theorem2(const FiniteChain& chain, const GridRegions& regions, int L2,
                               const Eigen::VectorXd& nu0) {
  const int L = chain.cycle_length();
  if (L2 < 0 || L2 >= L) throw std::invalid_argument("verify_theorem2: need 0 <= L2 < L");
  if (regions.inner_sets.size() != regions.theta_sets.size())
    throw std::invalid_argument("verify_theorem2: need one inner set per Theta_j");
  std::vector<char> seen(chain.size(), 0);
  for (const auto& set : regions.theta_sets)
    for (int i : set) {
      if (seen[i]) throw std::invalid_argument("verify_theorem2: Theta_j sets overlap");
      seen[i] = 1;
    }
  for (std::size_t jj = 0; jj < regions.theta_sets.size(); ++jj)
    for (int i : regions.inner_sets[jj])
      if (std::find(regions.theta_sets[jj].begin(), regions.theta_sets[jj].end(), i) ==
          regions.theta_sets[jj].end())
        throw std::invalid_argument("verify_theorem2: I_j not contained in Theta_j");

  Theorem2Report report;

  // exact marginals nu^(L2) and nu^(L)
  Trajectory traj = propagate_exact(chain, nu0, 1);
  const Eigen::VectorXd& nu_l2 = traj.nu[L2];
  const Eigen::VectorXd& nu_l = traj.nu[L];

  // delta1: escape probability with the complement of Theta_j absorbing
  for (std::size_t jj = 0; jj < regions.theta_sets.size(); ++jj) {
    const auto& set = regions.theta_sets[jj];
    const int n = static_cast<int>(set.size());
    Matrix survivors = Matrix::Identity(n, n); // row s = law of start s, not yet escaped
    for (int i = L2 + 1; i <= L; ++i) {
      Matrix sub(n, n);
      const Matrix& M = chain.kernels[i - 1];
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) sub(a, b) = M(set[a], set[b]);
      survivors = (survivors * sub).eval();
    }
    for (int s : regions.inner_sets[jj]) {
      int local = static_cast<int>(std::find(set.begin(), set.end(), s) - set.begin());
      report.delta1 = std::max(report.delta1, 1.0 - survivors.row(local).sum());
    }
  }

  // delta2: restricted-chain mixing error at the end of the cycle
  std::vector<Eigen::VectorXd> pi_restricted;
  for (std::size_t jj = 0; jj < regions.theta_sets.size(); ++jj) {
    const auto& set = regions.theta_sets[jj];
    const int n = static_cast<int>(set.size());
    pi_restricted.push_back(restricted_pi(chain, set));
    Matrix flow = Matrix::Identity(n, n);
    for (int i = L2 + 1; i <= L; ++i) flow = (flow * restrict_kernel(chain, i, set)).eval();
    for (int s : regions.inner_sets[jj]) {
      int local = static_cast<int>(std::find(set.begin(), set.end(), s) - set.begin());
      double tv = (flow.row(local).transpose() - pi_restricted[jj]).cwiseAbs().sum();
      report.delta2 = std::max(report.delta2, tv);
    }
  }

  // left-hand side and remainder
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(chain.size());
  double inner_total = 0.0;
  for (std::size_t jj = 0; jj < regions.theta_sets.size(); ++jj) {
    double mass = 0.0;
    for (int i : regions.inner_sets[jj]) mass += nu_l2[i];
    report.inner_mass.push_back(mass);
    inner_total += mass;
    for (std::size_t a = 0; a < regions.theta_sets[jj].size(); ++a)
      mix[regions.theta_sets[jj][a]] += mass * pi_restricted[jj][a];
  }
  report.lhs_tv = (nu_l - mix).cwiseAbs().sum();
  report.remainder = 1.0 - inner_total;
  report.slack = report.delta1 + report.delta2 + report.remainder - report.lhs_tv;
  report.ok = report.slack >= -1e-10;
  return report;
}

double check_path_sampling(const FiniteChain& chain, int j, int quadrature_points) {
  check_j(chain, j);
  double beta_prev = chain.betas[j - 1], beta_cur = chain.betas[j];
  double lhs = chain.log_normalizers[j - 1] - chain.log_normalizers[j];

  auto mean_energy = [&](double t) {
    double b = t * beta_cur + (1.0 - t) * beta_prev;
    Eigen::ArrayXd logw = -b * chain.energies.array();
    double shift = logw.maxCoeff();
    Eigen::ArrayXd w = (logw - shift).exp();
    return (w * chain.energies.array()).sum() / w.sum();
  };
  double rhs = (beta_cur - beta_prev) * gl_integrate(mean_energy, 0.0, 1.0, quadrature_points);
  return std::abs(lhs - rhs);
}

LyapunovCheck check_lyapunov_lemma(double sigma, double s, double c, double alpha_exp,
                                   std::span<const double> theta_grid) {
  if (sigma <= 0.0 || c <= 0.0 || alpha_exp <= 0.0 || s < 0.0)
    throw std::invalid_argument("check_lyapunov_lemma: bad parameters");

  auto V = [&](double u) { return std::exp((alpha_exp / sigma) * std::abs(u)); };
  const double target_var = s * c * c * sigma * sigma;
  const double half = s * sigma;

  LyapunovCheck result;
  result.max_violation = -std::numeric_limits<double>::infinity();
  for (double theta : theta_grid) {
    double kv;
    if (half == 0.0) {
      kv = V(theta); // degenerate zero-width proposal: K is the identity
    } else {
      auto integrand = [&](double x) {
        double next = theta + x;
        double log_ratio = (theta * theta - next * next) / (2.0 * target_var);
        double a = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
        return a * V(next) + (1.0 - a) * V(theta);
      };
      // split at the kinks of the acceptance ratio and of V
      std::vector<double> cuts = {-half, half};
      for (double k : {0.0, -theta, -2.0 * theta})
        if (k > -half && k < half) cuts.push_back(k);
      std::sort(cuts.begin(), cuts.end());
      double scale = 2.0 * half * V(std::abs(theta) + half);
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        AdaptiveResult piece = adaptive_simpson(integrand, cuts[i], cuts[i + 1], 1e-8, scale);
        if (!piece.converged) result.quadrature_converged = false;
        acc += piece.value;
      }
      kv = acc / (2.0 * half);
    }
    double indicator = std::abs(theta) <= half ? std::exp(2.0 * s * alpha_exp) : 0.0;
    double violation = kv - 0.7 * V(theta) - indicator;
    if (violation > result.max_violation) {
      result.max_violation = violation;
      result.argmax_theta = theta;
    }
  }
  return result;
}

DriftBounds drift_union_bound(double alpha_drift, double beta_drift, double m, int steps,
                              double ev_start) {
  if (alpha_drift <= 0.0 || alpha_drift > 1.0)
    throw std::invalid_argument("drift_union_bound: need 0 < alpha <= 1");
  if (beta_drift < 0.0) throw std::invalid_argument("drift_union_bound: need beta >= 0");
  if (m <= 0.0) throw std::invalid_argument("drift_union_bound: need m > 0");
  if (steps < 0) throw std::invalid_argument("drift_union_bound: need steps >= 0");
  double ratio = beta_drift / alpha_drift;
  double decay = std::exp(-m);
  return {steps * ratio * decay, decay * (ratio + ev_start)};
}

DriftFit fit_drift_constants(const FiniteChain& chain, const std::vector<int>& theta_set, int L2,
                             const Eigen::VectorXd& lyapunov) {
  const int L = chain.cycle_length();
  if (lyapunov.size() != chain.size())
    throw std::invalid_argument("fit_drift_constants: V size mismatch");
  if (lyapunov.minCoeff() < 1.0)
    throw std::invalid_argument("fit_drift_constants: V must be >= 1");

  // worst-case one-step drift ratio (M_i V)(x) vs V(x) over the set and steps
  std::vector<double> mv_over_set;
  std::vector<double> v_over_set;
  for (int i = L2 + 1; i <= L; ++i) {
    Eigen::VectorXd mv = chain.kernels[i - 1] * lyapunov;
    for (int x : theta_set) {
      mv_over_set.push_back(mv[x]);
      v_over_set.push_back(lyapunov[x]);
    }
  }

  std::vector<char> inside(chain.size(), 0);
  for (int x : theta_set) inside[x] = 1;
  double min_outside = std::numeric_limits<double>::infinity();
  for (int x = 0; x < chain.size(); ++x)
    if (!inside[x]) min_outside = std::min(min_outside, lyapunov[x]);

  DriftFit fit;
  fit.m = std::log(min_outside);
  double best_bound = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 99; ++step) {
    double a = step / 100.0;
    double b = 0.0;
    for (std::size_t t = 0; t < mv_over_set.size(); ++t)
      b = std::max(b, mv_over_set[t] - (1.0 - a) * v_over_set[t]);
    double bound = b / a;
    if (bound < best_bound) {
      best_bound = bound;
      fit.alpha = a;
      fit.beta = b;
      fit.valid = true;
    }
  }
  double ev = 0.0;
  for (int x : theta_set) ev = std::max(ev, lyapunov[x]);
  fit.ev_start = ev;
  return fit;
}

} // namespace cymc
