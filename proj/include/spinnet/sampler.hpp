#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinnet/ising.hpp"
#include "spinnet/rng.hpp"

namespace spinnet {

// Metropolis anneal settings. `sweeps` is the total number of full-lattice
// sweeps per anneal, split as evenly as possible over the beta schedule.
struct AnnealConfig {
  int sweeps = 1000;
  std::vector<double> beta_schedule;  // inverse temperatures, non-decreasing
  int restarts = 1;
  std::uint64_t rng_seed = 0;
  double cycle_depth = 0.3;  // fraction of the schedule re-entered per cycle
  int n_cycles = 5;

  void validate_forward() const;
  void validate_cyclic() const;
};

std::vector<double> geometric_schedule(double beta0, double beta1, int steps);

// oracle-grade settings: slow schedule, several restarts
AnnealConfig thorough_config(std::uint64_t seed = 0);
// training-grade settings: short schedule, single restart
AnnealConfig fast_config(std::uint64_t seed = 0);

struct AnnealResult {
  SpinState state;
  double energy;
};

// Lowest-energy state seen across all restarts; frozen spins never move.
AnnealResult forward_anneal(const IsingProblem& problem, const AnnealConfig& config);

// Search localized near `reference`: start there and run n_cycles of
// partial re-heat (re-enter the schedule cycle_depth from the cold end) and
// re-cool, keeping the best state seen.
AnnealResult cyclic_anneal(const IsingProblem& problem, const SpinState& reference,
                           const AnnealConfig& config);

struct SampleBatch {
  std::vector<SpinState> states;
  std::vector<double> energies;
  std::vector<std::string> origins;  // "ref:<k>" or "random"

  int size() const { return static_cast<int>(states.size()); }
};

// m low-energy samples: the first min(m, references) members run
// cyclic_anneal from each reference in order, the rest forward_anneal.
// Member k draws from the derived stream derive_seed(rng_seed, k), so the
// batch is identical whether members run serially or in parallel.
SampleBatch sample_batch(const IsingProblem& problem, const std::vector<SpinState>& references,
                         int m, const AnnealConfig& config, bool parallel = true);

// serial reference for the parallel batch kernel; bit-identical results
SampleBatch sample_batch_serial(const IsingProblem& problem,
                                const std::vector<SpinState>& references, int m,
                                const AnnealConfig& config);

// Single-spin-flip Metropolis walker over a fixed problem. Maintains local
// fields and an incrementally updated energy; refreshes both from scratch
// every kRefreshInterval sweeps so drift stays below audit tolerance.
class MetropolisWalker {
 public:
  static constexpr int kRefreshInterval = 128;

  MetropolisWalker(const IsingProblem& problem, std::uint64_t seed);

  void init_random();
  void init_from(const SpinState& state);
  void sweep(double beta);

  double energy() const { return energy_; }
  const SpinState& state() const { return state_; }
  double best_energy() const { return best_energy_; }
  const SpinState& best_state() const { return best_state_; }

  // recompute fields and energy from scratch; returns the fresh energy
  double refresh();

 private:
  void flip(int i);

  const IsingProblem& p_;
  Rng rng_;
  SpinState state_;
  std::vector<double> field_;
  std::vector<int> free_;
  double energy_ = 0.0;
  SpinState best_state_;
  double best_energy_ = 0.0;
  int sweeps_since_refresh_ = 0;
};

}  // namespace spinnet
