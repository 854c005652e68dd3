#include "cymc/sampler.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cymc {

void RunConfig::validate() const {
  if (cycles < 1) throw std::invalid_argument("run config: cycles must be >= 1");
  if (thinning < 0) throw std::invalid_argument("run config: thinning must be >= 0");
  schedule.validate();
  proposal.validate();
}

std::array<double, 10> RunOutput::acceptance_by_phase() const {
  std::array<double, 10> rates;
  for (int i = 0; i < 10; ++i)
    rates[i] = proposed_by_decile[i] > 0
                   ? static_cast<double>(accepted_by_decile[i]) / proposed_by_decile[i]
                   : -1.0;
  return rates;
}

namespace {

int beta_decile(double beta) {
  int d = static_cast<int>(beta * 10.0);
  return d > 9 ? 9 : d;
}

Vector draw_init(Rng& rng, const InitSpec& init, const Target& target) {
  switch (init.kind) {
    case InitSpec::Kind::PointMass:
      return init.mean;
    case InitSpec::Kind::MixtureDraw:
      return sample_mixture(rng, target);
    case InitSpec::Kind::UniformBox: {
      Vector p(init.box.lower.size());
      for (Eigen::Index i = 0; i < p.size(); ++i)
        p[i] = init.box.lower[i] + (init.box.upper[i] - init.box.lower[i]) * rng.uniform();
      return p;
    }
    case InitSpec::Kind::Gaussian:
    default: {
      Vector p(init.mean.size());
      double sd = std::sqrt(init.variance);
      for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = init.mean[i] + sd * rng.normal();
      return p;
    }
  }
}

} // namespace

RunOutput run_cyclical(const RunConfig& config, const Target& target, Rng& rng) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  const long L = config.schedule.cycle_length;
  const long total = static_cast<long>(config.cycles) * L;

  RunOutput out;
  out.cycle_end_samples.reserve(config.cycles);
  out.metadata.seed = config.seed;
  out.metadata.rng_algorithm = Rng::algorithm_name;

  Vector state = draw_init(rng, config.init, target);
  for (long j = 1; j <= total; ++j) {
    double beta = beta_step(config.schedule, j);
    StepResult step = mh_step(rng, target, beta, config.proposal, state);
    state = std::move(step.state);
    int d = beta_decile(beta);
    ++out.proposed_by_decile[d];
    if (step.accepted) ++out.accepted_by_decile[d];
    if (config.thinning > 0 && j % config.thinning == 0) out.thinned_trace.push_back(state);
    if (j % L == 0) out.cycle_end_samples.push_back(state);
  }
  out.metadata.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RunOutput run_cyclical(const RunConfig& config, const Target& target) {
  Rng rng(config.seed);
  return run_cyclical(config, target, rng);
}

RunOutput run_within_mode(const RunConfig& config, const Target& target,
                          const ModeRegion& regions, int region_index, const Vector& start,
                          int start_step) {
  config.validate();
  regions.validate();
  const long L = config.schedule.cycle_length;
  if (start_step < 0 || start_step >= L)
    throw std::invalid_argument("run_within_mode: start step must lie in [0, L)");
  if (region_index < 0 || region_index >= static_cast<int>(regions.inner_sets.size()) ||
      !regions.inner_sets[region_index].contains(start))
    throw std::invalid_argument("run_within_mode: start must lie in the inner set I_j");

  RunOutput out;
  out.metadata.seed = config.seed;
  out.metadata.rng_algorithm = Rng::algorithm_name;
  Rng rng(config.seed);
  Vector state = start;
  for (long j = start_step + 1; j <= L; ++j) {
    double beta = beta_step(config.schedule, j);
    StepResult step =
        restricted_mh_step(rng, target, beta, config.proposal, region_index, regions, state);
    state = std::move(step.state);
    int d = beta_decile(beta);
    ++out.proposed_by_decile[d];
    if (step.accepted) ++out.accepted_by_decile[d];
    out.thinned_trace.push_back(state);
  }
  out.cycle_end_samples.push_back(state);
  return out;
}

EscapeEstimate estimate_escape_probability(const RunConfig& config, const Target& target,
                                           const ModeRegion& regions, int region_index,
                                           const Vector& start, int start_step, int replicas) {
  config.validate();
  regions.validate();
  if (replicas < 1) throw std::invalid_argument("estimate_escape_probability: replicas must be >= 1");
  if (!regions.inner_sets.at(region_index).contains(start))
    throw std::invalid_argument("estimate_escape_probability: start must lie in I_j");
  const Box& box = regions.boxes[region_index];
  const long L = config.schedule.cycle_length;

  long escapes = 0;
  for (int r = 0; r < replicas; ++r) {
    Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r));
    Vector state = start;
    for (long j = start_step + 1; j <= L; ++j) {
      double beta = beta_step(config.schedule, j);
      state = mh_step(rng, target, beta, config.proposal, state).state;
      if (!box.contains(state)) {
        ++escapes;
        break;
      }
    }
  }
  double p = static_cast<double>(escapes) / replicas;
  double se = std::sqrt(p * (1.0 - p) / replicas);
  return {p, se, replicas};
}

std::vector<RunOutput> run_replicas(const RunConfig& config, const Target& target, int replicas) {
  config.validate();
  if (replicas < 1) throw std::invalid_argument("run_replicas: replicas must be >= 1");
  std::vector<RunOutput> outputs(replicas);
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), replicas);
  if (workers < 1) workers = 1;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) {
      Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r));
      outputs[r] = run_cyclical(config, target, rng);
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return outputs;
}

} // namespace cymc
