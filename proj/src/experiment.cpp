#include "cymc/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <limits>
#include <sstream>

#include "cymc/diagnostics.hpp"
#include "cymc/io.hpp"

namespace cymc {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const Json* find(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const Json& obj, const std::string& where, const char* key, double fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(where + "/" + key, "expected a number");
  return v->get<double>();
}

long get_integer(const Json& obj, const std::string& where, const char* key, long fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(where + "/" + key, "expected an integer");
  return v->get<long>();
}

bool get_bool(const Json& obj, const std::string& where, const char* key, bool fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(where + "/" + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const Json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(where + "/" + key, "expected a string");
  return v->get<std::string>();
}

Vector get_vector(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(where, "expected a non-empty array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Box parse_box(const Json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object {lower, upper}");
  const Json* lo = find(v, "lower");
  const Json* hi = find(v, "upper");
  if (!lo || !hi) fail(where, "expected both lower and upper");
  Box b;
  b.lower = get_vector(*lo, where + "/lower");
  b.upper = get_vector(*hi, where + "/upper");
  if (b.lower.size() != b.upper.size() || (b.upper - b.lower).minCoeff() <= 0.0)
    fail(where, "lower must be strictly below upper, same length");
  return b;
}

Target parse_target(const Json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object {weights, means, variances}");
  const Json* w = find(v, "weights");
  const Json* m = find(v, "means");
  const Json* s2 = find(v, "variances");
  if (!w || !m || !s2) fail(where, "weights, means and variances are all required");
  if (!w->is_array() || !m->is_array() || !s2->is_array() || w->empty() ||
      w->size() != m->size() || w->size() != s2->size())
    fail(where, "weights, means and variances must be equal-length non-empty arrays");
  Target t;
  t.components.resize(w->size());
  for (std::size_t i = 0; i < w->size(); ++i) {
    auto& c = t.components[i];
    if (!(*w)[i].is_number() || !(*s2)[i].is_number())
      fail(where, "weights and variances must be numeric");
    c.weight = (*w)[i].get<double>();
    c.variance = (*s2)[i].get<double>();
    c.mean = get_vector((*m)[i], where + "/means");
  }
  t.dimension = static_cast<int>(t.components.front().mean.size());
  if (const Json* d = find(v, "domain")) t.domain = parse_box(*d, where + "/domain");
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return t;
}

void parse_run_section(const Json& v, const std::string& where, RunConfig& run) {
  if (!v.is_object()) fail(where, "expected an object");
  run.cycles = static_cast<int>(get_integer(v, where, "cycles", run.cycles));
  run.schedule.cycle_length =
      static_cast<int>(get_integer(v, where, "cycle_length", run.schedule.cycle_length));
  run.schedule.power = get_number(v, where, "power", run.schedule.power);
  run.schedule.floor_value = get_number(v, where, "floor", run.schedule.floor_value);
  run.thinning = static_cast<int>(get_integer(v, where, "thinning", run.thinning));
  if (const Json* p = find(v, "proposal")) {
    std::string pw = where + "/proposal";
    if (!p->is_object()) fail(pw, "expected an object");
    std::string family = get_string(*p, pw, "family", "gaussian");
    if (family == "gaussian")
      run.proposal.family = ProposalFamily::GaussianIsotropic;
    else if (family == "uniform")
      run.proposal.family = ProposalFamily::UniformWindow;
    else
      fail(pw + "/family", "expected \"gaussian\" or \"uniform\"");
    run.proposal.base_scale = get_number(*p, pw, "base_scale", run.proposal.base_scale);
    run.proposal.temperature_exponent =
        get_number(*p, pw, "temperature_exponent", run.proposal.temperature_exponent);
    if (const Json* h = find(*p, "fixed_halfwidth")) {
      if (!h->is_number()) fail(pw + "/fixed_halfwidth", "expected a number");
      run.proposal.fixed_halfwidth = h->get<double>();
    }
  }
  if (const Json* init = find(v, "init")) {
    std::string iw = where + "/init";
    if (!init->is_object()) fail(iw, "expected an object");
    std::string kind = get_string(*init, iw, "kind", "gaussian");
    if (kind == "point")
      run.init.kind = InitSpec::Kind::PointMass;
    else if (kind == "gaussian")
      run.init.kind = InitSpec::Kind::Gaussian;
    else if (kind == "uniform-box")
      run.init.kind = InitSpec::Kind::UniformBox;
    else if (kind == "mixture")
      run.init.kind = InitSpec::Kind::MixtureDraw;
    else
      fail(iw + "/kind", "expected point, gaussian, uniform-box or mixture");
    if (const Json* m = find(*init, "mean")) run.init.mean = get_vector(*m, iw + "/mean");
    run.init.variance = get_number(*init, iw, "variance", run.init.variance);
    if (const Json* b = find(*init, "box")) run.init.box = parse_box(*b, iw + "/box");
  }
}

std::vector<int> get_int_list(const Json& obj, const std::string& where, const char* key,
                              std::vector<int> fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_array()) fail(where + "/" + key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : *v) {
    if (!e.is_number_integer()) fail(where + "/" + key, "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<double> get_double_list(const Json& obj, const std::string& where, const char* key,
                                    std::vector<double> fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_array()) fail(where + "/" + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) fail(where + "/" + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json box_json(const Box& b) {
  return Json{{"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}};
}

std::string iso_timestamp(double wall_seconds) {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  std::ostringstream ss;
  ss << buf << " wall=" << format_double(wall_seconds) << "s";
  return ss.str();
}

Json weight_report_json(const WeightReport& r) {
  Json out;
  out["counts"] = r.counts;
  out["weights"] = r.weights;
  out["unassigned"] = r.unassigned;
  return out;
}

Json marginal_json(const MarginalErrorEntry& e, int mode, int axis) {
  Json out;
  out["mode"] = mode;
  out["axis"] = axis;
  out["bins"] = e.bins;
  out["l1_error"] = e.l1_error;
  out["sample_count"] = e.sample_count;
  out["low_count"] = e.low_count;
  return out;
}

std::string marginal_csv(const MarginalErrorEntry& e) {
  std::ostringstream ss;
  ss << "bin_center,estimated,truth\n";
  for (int b = 0; b < e.bins; ++b)
    ss << format_double(e.bin_centers[b]) << ',' << format_double(e.estimated[b]) << ','
       << format_double(e.truth[b]) << '\n';
  return ss.str();
}

ModeRegion regions_for(const ExperimentConfig& config, const Target& target) {
  if (config.preset.rfind("toy1d", 0) == 0) return toy1d_mode_region();
  return mode_region_from_means(target, config.mode_radius);
}

Json execute_run(const ExperimentConfig& config, double* wall_out) {
  Target target = config.custom_target ? *config.custom_target : build_preset(config.preset);
  auto t0 = std::chrono::steady_clock::now();

  std::vector<Vector> samples;
  std::array<long, 10> accepted{}, proposed{};
  if (config.replicas > 1) {
    auto outputs = run_replicas(config.run, target, config.replicas);
    for (const auto& o : outputs) {
      samples.insert(samples.end(), o.cycle_end_samples.begin(), o.cycle_end_samples.end());
      for (int i = 0; i < 10; ++i) {
        accepted[i] += o.accepted_by_decile[i];
        proposed[i] += o.proposed_by_decile[i];
      }
    }
  } else {
    RunOutput o = run_cyclical(config.run, target);
    samples = std::move(o.cycle_end_samples);
    accepted = o.accepted_by_decile;
    proposed = o.proposed_by_decile;
  }
  *wall_out = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ModeRegion regions = regions_for(config, target);
  WeightReport strict = estimate_weights(samples, regions, Assignment::StrictBox);
  WeightReport nearest = estimate_weights(samples, regions, Assignment::NearestCenter);

  // Per-mode axis-0 marginal errors; for many-mode targets only the last
  // component (the interesting one in the graded-variance grid) is reported.
  std::vector<int> marginal_modes;
  if (regions.boxes.size() <= 4)
    for (std::size_t j = 0; j < regions.boxes.size(); ++j) marginal_modes.push_back(static_cast<int>(j));
  else
    marginal_modes.push_back(static_cast<int>(regions.boxes.size()) - 1);

  Json marginals = Json::array();
  std::filesystem::path out_dir(config.out_dir);
  for (int mode : marginal_modes) {
    MarginalErrorEntry e =
        mode_marginal_error(samples, regions, target, mode, 0, config.marginal_bins);
    marginals.push_back(marginal_json(e, mode, 0));
    write_text_atomic(out_dir / ("marginal_mode" + std::to_string(mode) + ".csv"),
                      marginal_csv(e));
  }

  write_text_atomic(out_dir / "samples.csv", samples_csv(samples));
  {
    std::ostringstream ss; // weight-bar data
    ss << "mode,weight_strict,weight_nearest\n";
    for (std::size_t j = 0; j < strict.weights.size(); ++j)
      ss << j << ',' << format_double(strict.weights[j]) << ','
         << format_double(nearest.weights[j]) << '\n';
    write_text_atomic(out_dir / "weights.csv", ss.str());
  }

  Json report;
  report["weights"] = weight_report_json(nearest);
  report["weights_strict"] = weight_report_json(strict);
  report["marginals"] = marginals;
  Json phase = Json::array();
  for (int i = 0; i < 10; ++i)
    phase.push_back(proposed[i] > 0 ? static_cast<double>(accepted[i]) / proposed[i] : -1.0);
  report["acceptance_by_phase"] = phase;
  report["sample_count"] = samples.size();
  return report;
}

Json execute_spectral(const ExperimentConfig& config, double* wall_out) {
  const SpectralParams& sp = config.spectral;
  Target target = config.custom_target ? *config.custom_target : build_preset(sp.preset);
  auto t0 = std::chrono::steady_clock::now();

  Schedule schedule{sp.cycle_length, sp.power, sp.floor_value};
  FiniteChain chain = discretize(target, sp.lo, sp.hi, sp.grid_points, sp.neighbor_window, schedule);
  Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  Theorem1Report thm1 = verify_theorem1(chain, nu0, sp.cycles);

  double max_path_residual = 0.0;
  for (int j = 1; j <= chain.cycle_length(); ++j)
    max_path_residual = std::max(max_path_residual,
                                 check_path_sampling(chain, j, sp.quadrature_points));

  std::vector<Prop1Row> prop1;
  if (!sp.scaling_lengths.empty())
    prop1 = verify_prop1_scaling(target, sp.lo, sp.hi, sp.grid_points, sp.neighbor_window,
                                 sp.scaling_lengths, sp.power);
  *wall_out = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::path out_dir(config.out_dir);
  {
    std::ostringstream ss;
    ss << "j,alpha,lambda\n";
    for (std::size_t j = 0; j < thm1.spectral.alpha.size(); ++j)
      ss << (j + 1) << ',' << format_double(thm1.spectral.alpha[j]) << ','
         << format_double(thm1.spectral.lambda[j]) << '\n';
    write_text_atomic(out_dir / "spectral.csv", ss.str());
  }
  {
    std::ostringstream ss;
    ss << "step,tv,var,var_bound\n";
    for (std::size_t j = 0; j < thm1.trajectory.tv.size(); ++j)
      ss << j << ',' << format_double(thm1.trajectory.tv[j]) << ','
         << format_double(thm1.trajectory.var[j]) << ','
         << format_double(thm1.unrolled_bound[j]) << '\n';
    write_text_atomic(out_dir / "trajectory.csv", ss.str());
  }

  Json report;
  report["alpha"] = thm1.spectral.alpha;
  report["lambda"] = thm1.spectral.lambda;
  report["capital_lambda"] = thm1.spectral.capital_lambda;
  report["recursion_ok"] = thm1.recursion_ok;
  report["cauchy_schwarz_ok"] = thm1.cauchy_schwarz_ok;
  report["min_recursion_slack"] = thm1.min_recursion_slack;
  Json cycle_tv = Json::array();
  for (int k = 1; k <= sp.cycles; ++k)
    cycle_tv.push_back(thm1.trajectory.tv[static_cast<std::size_t>(k) * sp.cycle_length]);
  report["cycle_end_tv"] = cycle_tv;
  report["stated_bound"] = thm1.stated_bound;
  report["max_path_sampling_residual"] = max_path_residual;
  report["interval_covers_a_mode"] = chain.interval_covers_a_mode;
  if (!prop1.empty()) {
    Json rows = Json::array();
    for (const auto& r : prop1)
      rows.push_back(Json{{"cycle_length", r.cycle_length},
                          {"max_alpha", r.max_alpha},
                          {"max_normalized", r.max_normalized},
                          {"constant_bound", r.constant_bound}});
    report["prop1_scaling"] = rows;
  }
  return report;
}

Json execute_theorem2(const ExperimentConfig& config, double* wall_out) {
  const Theorem2Params& tp = config.theorem2;
  Target target = two_mode_target(tp.sigma, tp.c, tp.lo, tp.hi);
  auto t0 = std::chrono::steady_clock::now();

  Schedule schedule{tp.cycle_length, tp.power, tp.floor_value};
  FiniteChain chain = discretize(target, tp.lo, tp.hi, tp.grid_points, tp.neighbor_window, schedule);
  GridRegions regions = GridRegions::from_intervals(
      chain, {{-1.5, -0.5}, {0.5, 1.5}}, {{-1.25, -0.75}, {0.75, 1.25}});
  Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(chain.size(), 1.0 / chain.size());
  Theorem2Report thm2 = verify_theorem2(chain, regions, tp.l2, nu0);

  // Drift-based delta_1 bound per mode region.
  Json drift = Json::array();
  for (std::size_t j = 0; j < regions.theta_sets.size(); ++j) {
    double mu = j == 0 ? -1.0 : 1.0;
    Eigen::VectorXd lyap =
        (tp.drift_rate * (chain.grid.array() - mu).abs()).exp().matrix();
    DriftFit fit = fit_drift_constants(chain, regions.theta_sets[j], tp.l2, lyap);
    Json entry;
    entry["mode"] = j;
    entry["valid"] = fit.valid;
    if (fit.valid) {
      DriftBounds bounds = drift_union_bound(fit.alpha, fit.beta, fit.m,
                                             tp.cycle_length - tp.l2, fit.ev_start);
      entry["alpha"] = fit.alpha;
      entry["beta"] = fit.beta;
      entry["m"] = fit.m;
      entry["delta1_bound"] = bounds.delta1_bound;
      entry["remainder_bound"] = bounds.remainder_bound;
    }
    drift.push_back(entry);
  }
  *wall_out = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json report;
  report["delta1"] = thm2.delta1;
  report["delta2"] = thm2.delta2;
  report["lhs_tv"] = thm2.lhs_tv;
  report["remainder"] = thm2.remainder;
  report["slack"] = thm2.slack;
  report["inner_mass"] = thm2.inner_mass;
  report["ok"] = thm2.ok;
  report["drift"] = drift;
  return report;
}

Json execute_lyapunov(const ExperimentConfig& config, double* wall_out) {
  const LyapunovParams& lp = config.lyapunov;
  std::vector<double> grid;
  for (double t = lp.grid_lo; t <= lp.grid_hi + 1e-12; t += lp.grid_step) grid.push_back(t);
  auto t0 = std::chrono::steady_clock::now();

  Json cases = Json::array();
  double overall_max = -std::numeric_limits<double>::infinity();
  std::ostringstream csv;
  csv << "s,c,max_violation,argmax_theta\n";
  for (double s : lp.s_values)
    for (double c : lp.c_values) {
      LyapunovCheck check = check_lyapunov_lemma(lp.sigma, s, c, lp.alpha_exp, grid);
      if (!check.quadrature_converged)
        throw NumericalFailure("lyapunov check: adaptive quadrature failed to converge at s=" +
                               format_double(s) + ", c=" + format_double(c));
      overall_max = std::max(overall_max, check.max_violation);
      cases.push_back(Json{{"s", s},
                           {"c", c},
                           {"max_violation", check.max_violation},
                           {"argmax_theta", check.argmax_theta}});
      csv << format_double(s) << ',' << format_double(c) << ','
          << format_double(check.max_violation) << ',' << format_double(check.argmax_theta)
          << '\n';
    }
  *wall_out = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_atomic(std::filesystem::path(config.out_dir) / "lyapunov.csv", csv.str());

  Json report;
  report["cases"] = cases;
  report["max_violation"] = overall_max;
  report["satisfied"] = overall_max <= 0.0;
  return report;
}

} // namespace

Target two_mode_target(double sigma, double c, double lo, double hi) {
  Target t;
  t.dimension = 1;
  MixtureComponent left, right;
  left.weight = right.weight = 0.5;
  left.mean = Vector::Constant(1, -1.0);
  right.mean = Vector::Constant(1, 1.0);
  left.variance = sigma * sigma;
  right.variance = c * c * sigma * sigma;
  t.components = {left, right};
  Box domain;
  domain.lower = Vector::Constant(1, lo);
  domain.upper = Vector::Constant(1, hi);
  t.domain = domain;
  t.validate();
  return t;
}

std::string samples_csv(const std::vector<Vector>& samples) {
  std::ostringstream ss;
  ss << "cycle";
  Eigen::Index dim = samples.empty() ? 1 : samples.front().size();
  for (Eigen::Index d = 0; d < dim; ++d) ss << ",dim_" << d;
  ss << '\n';
  for (std::size_t k = 0; k < samples.size(); ++k) {
    ss << (k + 1);
    for (Eigen::Index d = 0; d < samples[k].size(); ++d)
      ss << ',' << format_double(samples[k][d]);
    ss << '\n';
  }
  return ss.str();
}

ExperimentConfig parse_experiment_config(const Json& doc) {
  if (!doc.is_object()) fail("/", "config must be a JSON object");
  ExperimentConfig config;
  config.mode = get_string(doc, "/", "mode", config.mode);
  if (config.mode != "run" && config.mode != "spectral" && config.mode != "theorem2" &&
      config.mode != "lyapunov" && config.mode != "reproduce")
    fail("/mode", "expected run, spectral, theorem2, lyapunov or reproduce");
  config.preset = get_string(doc, "/", "preset", config.preset);
  if (const Json* t = find(doc, "target")) config.custom_target = parse_target(*t, "/target");
  if (config.mode == "run" && config.preset.empty() && !config.custom_target)
    fail("/preset", "run mode needs a preset or an explicit target");
  if (config.mode == "reproduce" && config.preset.empty())
    fail("/preset", "reproduce mode needs an experiment name");

  config.run.seed = static_cast<std::uint64_t>(get_integer(doc, "/", "seed", 0));
  config.marginal_bins = static_cast<int>(get_integer(doc, "/", "marginal_bins", config.marginal_bins));
  if (config.marginal_bins < 1) fail("/marginal_bins", "must be >= 1");
  config.mode_radius = get_number(doc, "/", "mode_radius", config.mode_radius);
  if (config.mode_radius <= 0.0) fail("/mode_radius", "must be positive");
  config.out_dir = get_string(doc, "/", "out_dir", config.out_dir);
  config.paper_scale = get_bool(doc, "/", "paper_scale", config.paper_scale);
  config.replicas = static_cast<int>(get_integer(doc, "/", "replicas", config.replicas));
  if (config.replicas < 1) fail("/replicas", "must be >= 1");

  if (const Json* run = find(doc, "run")) parse_run_section(*run, "/run", config.run);

  if (const Json* sp = find(doc, "spectral")) {
    const std::string w = "/spectral";
    if (!sp->is_object()) fail(w, "expected an object");
    auto& s = config.spectral;
    s.preset = get_string(*sp, w, "preset", s.preset);
    s.grid_points = static_cast<int>(get_integer(*sp, w, "grid_points", s.grid_points));
    s.neighbor_window = static_cast<int>(get_integer(*sp, w, "neighbor_window", s.neighbor_window));
    s.lo = get_number(*sp, w, "lo", s.lo);
    s.hi = get_number(*sp, w, "hi", s.hi);
    s.cycle_length = static_cast<int>(get_integer(*sp, w, "cycle_length", s.cycle_length));
    s.power = get_number(*sp, w, "power", s.power);
    s.floor_value = get_number(*sp, w, "floor", s.floor_value);
    s.cycles = static_cast<int>(get_integer(*sp, w, "cycles", s.cycles));
    s.scaling_lengths = get_int_list(*sp, w, "scaling_lengths", s.scaling_lengths);
    s.quadrature_points = static_cast<int>(get_integer(*sp, w, "quadrature_points", s.quadrature_points));
    if (s.grid_points < 2) fail(w + "/grid_points", "must be >= 2");
    if (s.neighbor_window < 1) fail(w + "/neighbor_window", "must be >= 1");
    if (s.hi <= s.lo) fail(w, "hi must exceed lo");
    if (s.cycles < 1) fail(w + "/cycles", "must be >= 1");
    if (s.quadrature_points < 2) fail(w + "/quadrature_points", "must be >= 2");
  }

  if (const Json* tp = find(doc, "theorem2")) {
    const std::string w = "/theorem2";
    if (!tp->is_object()) fail(w, "expected an object");
    auto& t = config.theorem2;
    t.sigma = get_number(*tp, w, "sigma", t.sigma);
    t.c = get_number(*tp, w, "c", t.c);
    t.grid_points = static_cast<int>(get_integer(*tp, w, "grid_points", t.grid_points));
    t.neighbor_window = static_cast<int>(get_integer(*tp, w, "neighbor_window", t.neighbor_window));
    t.lo = get_number(*tp, w, "lo", t.lo);
    t.hi = get_number(*tp, w, "hi", t.hi);
    t.cycle_length = static_cast<int>(get_integer(*tp, w, "cycle_length", t.cycle_length));
    t.l2 = static_cast<int>(get_integer(*tp, w, "l2", t.l2));
    t.power = get_number(*tp, w, "power", t.power);
    t.floor_value = get_number(*tp, w, "floor", t.floor_value);
    t.drift_rate = get_number(*tp, w, "drift_rate", t.drift_rate);
    if (t.sigma <= 0.0 || t.c <= 0.0) fail(w, "sigma and c must be positive");
    if (t.l2 < 0 || t.l2 >= t.cycle_length) fail(w + "/l2", "must lie in [0, cycle_length)");
  }

  if (const Json* lp = find(doc, "lyapunov")) {
    const std::string w = "/lyapunov";
    if (!lp->is_object()) fail(w, "expected an object");
    auto& l = config.lyapunov;
    l.sigma = get_number(*lp, w, "sigma", l.sigma);
    l.alpha_exp = get_number(*lp, w, "alpha", l.alpha_exp);
    l.s_values = get_double_list(*lp, w, "s_values", l.s_values);
    l.c_values = get_double_list(*lp, w, "c_values", l.c_values);
    l.grid_lo = get_number(*lp, w, "grid_lo", l.grid_lo);
    l.grid_hi = get_number(*lp, w, "grid_hi", l.grid_hi);
    l.grid_step = get_number(*lp, w, "grid_step", l.grid_step);
    if (l.sigma <= 0.0) fail(w + "/sigma", "must be positive");
    if (l.grid_step <= 0.0 || l.grid_hi <= l.grid_lo) fail(w, "need grid_lo < grid_hi, grid_step > 0");
    if (l.s_values.empty() || l.c_values.empty()) fail(w, "s_values and c_values must be non-empty");
    for (double s : l.s_values)
      if (s <= 0.0) fail(w + "/s_values", "proposal half-widths must be positive");
  }

  try {
    config.run.validate();
  } catch (const std::invalid_argument& e) {
    fail("/run", e.what());
  }
  return config;
}

Json resolved_config_json(const ExperimentConfig& config) {
  Json out;
  out["mode"] = config.mode;
  out["preset"] = config.preset;
  if (config.custom_target) {
    const Target& t = *config.custom_target;
    Json tj;
    Json w = Json::array(), m = Json::array(), s2 = Json::array();
    for (const auto& c : t.components) {
      w.push_back(c.weight);
      m.push_back(vector_json(c.mean));
      s2.push_back(c.variance);
    }
    tj["weights"] = w;
    tj["means"] = m;
    tj["variances"] = s2;
    if (t.domain) tj["domain"] = box_json(*t.domain);
    out["target"] = tj;
  }
  out["seed"] = config.run.seed;
  out["marginal_bins"] = config.marginal_bins;
  out["mode_radius"] = config.mode_radius;
  // out_dir is deliberately omitted: reports are byte-identical for the same
  // config + seed regardless of where they are written
  out["paper_scale"] = config.paper_scale;
  out["replicas"] = config.replicas;

  Json run;
  run["cycles"] = config.run.cycles;
  run["cycle_length"] = config.run.schedule.cycle_length;
  run["power"] = config.run.schedule.power;
  run["floor"] = config.run.schedule.floor_value;
  run["thinning"] = config.run.thinning;
  Json prop;
  prop["family"] =
      config.run.proposal.family == ProposalFamily::GaussianIsotropic ? "gaussian" : "uniform";
  prop["base_scale"] = config.run.proposal.base_scale;
  prop["temperature_exponent"] = config.run.proposal.temperature_exponent;
  if (config.run.proposal.fixed_halfwidth)
    prop["fixed_halfwidth"] = *config.run.proposal.fixed_halfwidth;
  run["proposal"] = prop;
  Json init;
  switch (config.run.init.kind) {
    case InitSpec::Kind::PointMass: init["kind"] = "point"; break;
    case InitSpec::Kind::Gaussian: init["kind"] = "gaussian"; break;
    case InitSpec::Kind::UniformBox: init["kind"] = "uniform-box"; break;
    case InitSpec::Kind::MixtureDraw: init["kind"] = "mixture"; break;
  }
  if (config.run.init.mean.size() > 0) init["mean"] = vector_json(config.run.init.mean);
  init["variance"] = config.run.init.variance;
  if (config.run.init.box.lower.size() > 0) init["box"] = box_json(config.run.init.box);
  run["init"] = init;
  out["run"] = run;

  Json sp;
  sp["preset"] = config.spectral.preset;
  sp["grid_points"] = config.spectral.grid_points;
  sp["neighbor_window"] = config.spectral.neighbor_window;
  sp["lo"] = config.spectral.lo;
  sp["hi"] = config.spectral.hi;
  sp["cycle_length"] = config.spectral.cycle_length;
  sp["power"] = config.spectral.power;
  sp["floor"] = config.spectral.floor_value;
  sp["cycles"] = config.spectral.cycles;
  sp["scaling_lengths"] = config.spectral.scaling_lengths;
  sp["quadrature_points"] = config.spectral.quadrature_points;
  out["spectral"] = sp;

  Json tp;
  tp["sigma"] = config.theorem2.sigma;
  tp["c"] = config.theorem2.c;
  tp["grid_points"] = config.theorem2.grid_points;
  tp["neighbor_window"] = config.theorem2.neighbor_window;
  tp["lo"] = config.theorem2.lo;
  tp["hi"] = config.theorem2.hi;
  tp["cycle_length"] = config.theorem2.cycle_length;
  tp["l2"] = config.theorem2.l2;
  tp["power"] = config.theorem2.power;
  tp["floor"] = config.theorem2.floor_value;
  tp["drift_rate"] = config.theorem2.drift_rate;
  out["theorem2"] = tp;

  Json lp;
  lp["sigma"] = config.lyapunov.sigma;
  lp["alpha"] = config.lyapunov.alpha_exp;
  lp["s_values"] = config.lyapunov.s_values;
  lp["c_values"] = config.lyapunov.c_values;
  lp["grid_lo"] = config.lyapunov.grid_lo;
  lp["grid_hi"] = config.lyapunov.grid_hi;
  lp["grid_step"] = config.lyapunov.grid_step;
  out["lyapunov"] = lp;
  return out;
}

ExperimentConfig reproduce_config(const std::string& name, std::uint64_t seed, bool paper_scale) {
  ExperimentConfig config;
  config.run.seed = seed;
  config.paper_scale = paper_scale;

  auto sampling_defaults = [&](const std::string& preset) {
    config.mode = "run";
    config.preset = preset;
    if (preset.rfind("toy1d", 0) == 0) {
      config.run.cycles = paper_scale ? 1000 : 500;
      config.run.schedule.cycle_length = paper_scale ? 5000 : 2000;
      config.run.proposal.base_scale = 0.25;
      config.run.proposal.temperature_exponent = 1.0;
      config.run.init.kind = InitSpec::Kind::Gaussian;
      config.run.init.mean = Vector::Zero(1);
      config.run.init.variance = 1.0;
      config.marginal_bins = 10;
    } else {
      config.run.cycles = paper_scale ? 50000 : 5000;
      config.run.schedule.cycle_length = paper_scale ? 20000 : 2000;
      // a slightly higher temperature floor keeps the hot phase from going
      // uniform over the whole domain, which at desk-scale cycle lengths
      // funnels outer-ring mass into the border components when cooling
      config.run.schedule.floor_value = 0.01;
      config.run.proposal.base_scale = 0.01;
      config.run.proposal.temperature_exponent = 0.5;
      config.run.init.kind = InitSpec::Kind::UniformBox;
      config.run.init.box.lower = Vector::Constant(2, -6.0);
      config.run.init.box.upper = Vector::Constant(2, 6.0);
      config.marginal_bins = 8;
      config.mode_radius = 0.99; // keep adjacent grid boxes disjoint
    }
  };

  if (name == "toy1d-equal" || name == "toy1d-unequal" || name == "grid2d-equal" ||
      name == "grid2d-unequal") {
    sampling_defaults(name);
  } else if (name == "spectral-thm1") {
    config.mode = "spectral";
    config.preset = name;
    config.spectral.preset = "toy1d-equal";
    config.spectral.grid_points = 50;
    config.spectral.neighbor_window = 5;
    config.spectral.lo = -10.0;
    config.spectral.hi = 10.0;
    config.spectral.cycle_length = 64;
    config.spectral.cycles = 5;
    config.spectral.scaling_lengths = {64, 128};
    config.spectral.quadrature_points = 32;
  } else if (name == "theorem2-demo") {
    config.mode = "theorem2"; // defaults in Theorem2Params are the demo values
    config.preset = name;
  } else if (name == "lyapunov-demo") {
    config.mode = "lyapunov"; // defaults in LyapunovParams are the demo values
    config.preset = name;
  } else {
    fail("/preset", "unknown reproduce experiment \"" + name +
                        "\"; valid names: toy1d-equal, toy1d-unequal, grid2d-equal, "
                        "grid2d-unequal, spectral-thm1, theorem2-demo, lyapunov-demo");
  }
  return config;
}

Json execute(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);

  if (config.mode == "reproduce") {
    ExperimentConfig resolved = reproduce_config(config.preset, config.run.seed, config.paper_scale);
    resolved.out_dir = config.out_dir;
    resolved.replicas = config.replicas;
    Json report = execute(resolved);
    return report;
  }

  double wall = 0.0;
  Json body;
  if (config.mode == "run")
    body = execute_run(config, &wall);
  else if (config.mode == "spectral")
    body = execute_spectral(config, &wall);
  else if (config.mode == "theorem2")
    body = execute_theorem2(config, &wall);
  else if (config.mode == "lyapunov")
    body = execute_lyapunov(config, &wall);
  else
    fail("/mode", "unknown mode \"" + config.mode + "\"");

  Json report;
  report["mode"] = config.mode;
  report["preset"] = config.preset;
  report["seed"] = config.run.seed;
  report["rng_algorithm"] = Rng::algorithm_name;
  report["config"] = resolved_config_json(config);
  report["results"] = body;
  report["timestamp"] = iso_timestamp(wall);
  write_text_atomic(std::filesystem::path(config.out_dir) / "report.json", report.dump(2) + "\n");
  return report;
}

} // namespace cymc
