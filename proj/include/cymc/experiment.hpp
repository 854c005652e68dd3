#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cymc/sampler.hpp"
#include "cymc/spectral.hpp"
#include "cymc/targets.hpp"

namespace cymc {

using Json = nlohmann::ordered_json;

/// Configuration error carrying the offending JSON location.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical-failure signal (maps to CLI exit code 3).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralParams {
  std::string preset = "toy1d-equal";
  int grid_points = 50; // N
  int neighbor_window = 5;
  double lo = -10.0, hi = 10.0;
  int cycle_length = 64;
  double power = 1.0;
  double floor_value = 1e-3;
  int cycles = 5;
  std::vector<int> scaling_lengths; // L_list for the Proposition-1 table
  int quadrature_points = 32;
};

struct Theorem2Params {
  double sigma = 0.05;
  double c = 0.5;
  int grid_points = 80;
  int neighbor_window = 4;
  double lo = -2.0, hi = 2.0;
  int cycle_length = 128;
  int l2 = 64;
  double power = 1.0;
  double floor_value = 1e-3;
  double drift_rate = 10.0; // V_j(x) = exp(drift_rate |x - mu_j|)
};

struct LyapunovParams {
  double sigma = 0.01;
  double alpha_exp = 0.05;
  std::vector<double> s_values{0.5, 1.0, 2.0};
  std::vector<double> c_values{0.6, 1.0, 1.9};
  double grid_lo = -1.0, grid_hi = 1.0, grid_step = 0.005;
};

struct ExperimentConfig {
  std::string mode = "run"; // run | spectral | theorem2 | lyapunov | reproduce
  std::string preset;       // target preset (run) or experiment name (reproduce)
  std::optional<Target> custom_target;
  RunConfig run;
  int marginal_bins = 10;
  double mode_radius = 1.0; // half-width of the per-component assignment boxes
  SpectralParams spectral;
  Theorem2Params theorem2;
  LyapunovParams lyapunov;
  std::string out_dir = ".";
  bool paper_scale = false;
  int replicas = 1;
};

/// Parse + validate a config document; throws ConfigError with the JSON
/// location of the problem.
ExperimentConfig parse_experiment_config(const Json& doc);

/// Resolved (post-default) config, embedded verbatim in every report.
Json resolved_config_json(const ExperimentConfig& config);

/// Run the experiment, writing report.json and CSV artifacts into out_dir.
/// Returns the report. Throws ConfigError / NumericalFailure.
Json execute(const ExperimentConfig& config);

/// Desk-scale reproduction presets: toy1d-equal, toy1d-unequal, grid2d-equal,
/// grid2d-unequal, spectral-thm1, theorem2-demo, lyapunov-demo.
ExperimentConfig reproduce_config(const std::string& name, std::uint64_t seed, bool paper_scale);

/// Cycle-end samples as CSV (columns cycle, dim_0..dim_{d-1}).
std::string samples_csv(const std::vector<Vector>& samples);

/// The two-mode target of the theorem-2 lab: 0.5 N(-1, sigma^2) + 0.5 N(+1, (c sigma)^2).
Target two_mode_target(double sigma, double c, double lo, double hi);

} // namespace cymc
