#include "spinnet/sampler.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinnet {

void AnnealConfig::validate_forward() const {
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (beta_schedule.empty()) throw ConfigError("beta schedule is empty");
  double prev = 0.0;
  for (double b : beta_schedule) {
    if (b <= 0.0) throw ConfigError("beta schedule entries must be positive");
    if (b < prev) throw ConfigError("beta schedule must be non-decreasing");
    prev = b;
  }
}

void AnnealConfig::validate_cyclic() const {
  validate_forward();
  if (n_cycles < 1) throw ConfigError("n_cycles must be >= 1");
  if (!(cycle_depth > 0.0) || cycle_depth > 1.0) throw ConfigError("cycle_depth must be in (0,1]");
}

std::vector<double> geometric_schedule(double beta0, double beta1, int steps) {
  if (steps < 1 || beta0 <= 0.0 || beta1 < beta0)
    throw ConfigError("bad geometric schedule parameters");
  std::vector<double> s(static_cast<std::size_t>(steps));
  if (steps == 1) {
    s[0] = beta1;
    return s;
  }
  double ratio = std::pow(beta1 / beta0, 1.0 / (steps - 1));
  double b = beta0;
  for (int k = 0; k < steps; ++k) {
    s[static_cast<std::size_t>(k)] = b;
    b *= ratio;
  }
  s.back() = beta1;
  return s;
}

AnnealConfig thorough_config(std::uint64_t seed) {
  AnnealConfig c;
  c.beta_schedule = geometric_schedule(0.1, 10.0, 50);
  c.sweeps = 1000;  // 20 per schedule step
  c.restarts = 8;
  c.rng_seed = seed;
  return c;
}

AnnealConfig fast_config(std::uint64_t seed) {
  AnnealConfig c;
  c.beta_schedule = geometric_schedule(0.1, 10.0, 30);
  c.sweeps = 300;
  c.restarts = 1;
  c.rng_seed = seed;
  return c;
}

MetropolisWalker::MetropolisWalker(const IsingProblem& problem, std::uint64_t seed)
    : p_(problem), rng_(seed) {
  state_ = SpinState::filled(p_.n_spins(), -1);
  field_.resize(static_cast<std::size_t>(p_.n_spins()));
  free_.reserve(static_cast<std::size_t>(p_.n_free()));
  for (int i = 0; i < p_.n_spins(); ++i)
    if (p_.frozen()[i] == 0) free_.push_back(i);
  init_random();
}

void MetropolisWalker::init_random() {
  for (int i = 0; i < p_.n_spins(); ++i) {
    if (p_.frozen()[i] != 0)
      state_[i] = p_.frozen()[i];
    else
      state_[i] = rng_.coin() ? std::int8_t{1} : std::int8_t{-1};
  }
  refresh();
  best_state_ = state_;
  best_energy_ = energy_;
}

void MetropolisWalker::init_from(const SpinState& state) {
  p_.check_state(state);
  state.validate();
  state_ = state;
  refresh();
  best_state_ = state_;
  best_energy_ = energy_;
}

double MetropolisWalker::refresh() {
  for (int i = 0; i < p_.n_spins(); ++i) field_[i] = p_.local_field(state_, i);
  energy_ = p_.energy(state_);
  sweeps_since_refresh_ = 0;
  return energy_;
}

void MetropolisWalker::flip(int i) {
  energy_ += -2.0 * state_[i] * field_[i];
  state_[i] = static_cast<std::int8_t>(-state_[i]);
  for (int k = p_.adj_offsets()[i]; k < p_.adj_offsets()[i + 1]; ++k)
    field_[p_.adj()[k].first] += 2.0 * p_.adj()[k].second * state_[i];
}

void MetropolisWalker::sweep(double beta) {
  for (int i : free_) {
    double delta = -2.0 * state_[i] * field_[i];
    if (delta <= 0.0 || rng_.uniform() < std::exp(-beta * delta)) {
      flip(i);
      if (energy_ < best_energy_) {
        best_energy_ = energy_;
        best_state_ = state_;
      }
    }
  }
  if (++sweeps_since_refresh_ >= kRefreshInterval) refresh();
}

namespace {

// per-step sweep counts: total `sweeps` spread evenly, front-loaded remainder
std::vector<int> sweep_plan(int sweeps, int steps) {
  std::vector<int> plan(static_cast<std::size_t>(steps), sweeps / steps);
  for (int k = 0; k < sweeps % steps; ++k) ++plan[static_cast<std::size_t>(k)];
  return plan;
}

bool improves(double e, const SpinState& s, double best_e, const SpinState& best_s) {
  if (e != best_e) return e < best_e;
  return s < best_s;
}

}  // namespace

AnnealResult forward_anneal(const IsingProblem& problem, const AnnealConfig& config) {
  config.validate_forward();
  const auto plan = sweep_plan(config.sweeps, static_cast<int>(config.beta_schedule.size()));
  SpinState best;
  double best_e = 0.0;
  for (int r = 0; r < config.restarts; ++r) {
    MetropolisWalker w(problem, derive_seed(config.rng_seed, static_cast<std::uint64_t>(r)));
    for (std::size_t step = 0; step < config.beta_schedule.size(); ++step)
      for (int t = 0; t < plan[step]; ++t) w.sweep(config.beta_schedule[step]);
    double e = problem.energy(w.best_state());
    if (r == 0 || improves(e, w.best_state(), best_e, best)) {
      best = w.best_state();
      best_e = e;
    }
  }
  return {best, best_e};
}

AnnealResult cyclic_anneal(const IsingProblem& problem, const SpinState& reference,
                           const AnnealConfig& config) {
  config.validate_cyclic();
  const int steps = static_cast<int>(config.beta_schedule.size());
  const auto plan = sweep_plan(config.sweeps, steps);
  // re-enter the schedule `cycle_depth` of the way back from the cold end
  const int reheat_steps = std::max(1, static_cast<int>(std::llround(config.cycle_depth * steps)));
  const int start = steps - reheat_steps;

  MetropolisWalker w(problem, config.rng_seed);
  w.init_from(reference);
  for (int cycle = 0; cycle < config.n_cycles; ++cycle) {
    for (int step = start; step < steps; ++step)
      for (int t = 0; t < plan[static_cast<std::size_t>(step)]; ++t)
        w.sweep(config.beta_schedule[static_cast<std::size_t>(step)]);
  }
  double e = problem.energy(w.best_state());
  return {w.best_state(), e};
}

namespace {

SampleBatch run_batch(const IsingProblem& problem, const std::vector<SpinState>& references,
                      int m, const AnnealConfig& config, bool parallel) {
  if (m < 1) throw ContractError("batch size must be >= 1");
  const int n_cyclic = std::min<int>(m, static_cast<int>(references.size()));
  config.validate_forward();
  if (n_cyclic > 0) config.validate_cyclic();
  for (const auto& r : references) problem.check_state(r);

  SampleBatch batch;
  batch.states.resize(static_cast<std::size_t>(m));
  batch.energies.resize(static_cast<std::size_t>(m));
  batch.origins.resize(static_cast<std::size_t>(m));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int k = 0; k < m; ++k) {
    AnnealConfig member = config;
    member.rng_seed = derive_seed(config.rng_seed, static_cast<std::uint64_t>(k));
    AnnealResult r = k < n_cyclic
                         ? cyclic_anneal(problem, references[static_cast<std::size_t>(k)], member)
                         : forward_anneal(problem, member);
    batch.states[static_cast<std::size_t>(k)] = std::move(r.state);
    batch.energies[static_cast<std::size_t>(k)] = r.energy;
    batch.origins[static_cast<std::size_t>(k)] =
        k < n_cyclic ? "ref:" + std::to_string(k) : "random";
  }
  (void)parallel;

  // audit: recorded energies must match a fresh evaluation
  for (int k = 0; k < m; ++k) {
    if (problem.energy(batch.states[static_cast<std::size_t>(k)]) !=
        batch.energies[static_cast<std::size_t>(k)])
      throw ContractError("batch energy disagrees with re-evaluation");
  }
  return batch;
}

}  // namespace

SampleBatch sample_batch(const IsingProblem& problem, const std::vector<SpinState>& references,
                         int m, const AnnealConfig& config, bool parallel) {
  return run_batch(problem, references, m, config, parallel);
}

SampleBatch sample_batch_serial(const IsingProblem& problem,
                                const std::vector<SpinState>& references, int m,
                                const AnnealConfig& config) {
  return run_batch(problem, references, m, config, false);
}

}  // namespace spinnet
