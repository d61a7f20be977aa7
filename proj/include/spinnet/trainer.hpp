#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinnet/dataset.hpp"
#include "spinnet/network.hpp"
#include "spinnet/sampler.hpp"

namespace spinnet {

struct LearningRates {
  double w = 0.01;
  double j = 0.01;
  double h = 0.002;
  double o = 0.002;

  void validate() const;
};

// W ~ U[-1/sqrt(n_input), 1/sqrt(n_input)], J ~ U[-1/sqrt(n_hidden), ...],
// biases zero; deterministic per seed.
NetworkParams init_params(int n_input, int n_hidden, int n_classes, int redundancy,
                          std::uint64_t seed);

// Free-state statistics entering an update: per-spin means and the
// hidden x output correlator, each averaged over the sampled states.
struct FreeStats {
  std::vector<double> hidden_mean;  // n_hidden
  std::vector<double> output_mean;  // n_output
  std::vector<double> correlator;   // n_hidden x n_output, row-major
};

FreeStats batch_stats(const SampleBatch& batch, int n_hidden, int n_output);
FreeStats state_stats(const SpinState& state, int n_hidden, int n_output);


NetworkParams eqprop_update(const NetworkParams& params, const InputImage& image, int y,
                            const SpinState& free_state, const SpinState& nudge,
                            const LearningRates& rates);

NetworkParams dragon_update(const NetworkParams& params, const InputImage& image, int y,
                            const SampleBatch& batch, const SpinState& nudge,
                            const LearningRates& rates);

NetworkParams dragon_update_from_stats(const NetworkParams& params, const InputImage& image,
                                       const FreeStats& stats, const SpinState& nudge,
                                       const LearningRates& rates);

enum class TrainMethod { eqprop, dragon, deep_sweep, backprop };

std::string method_name(TrainMethod m);
TrainMethod method_from_name(const std::string& name);

struct TrainOptions {
  TrainMethod method = TrainMethod::eqprop;
  int m = 1;  // dragon batch size
  LearningRates rates;
  AnnealConfig sampler;
  std::uint64_t seed = 0;
  double nudge_strength = 1.0;
  // fraction of cyclic batch members decoding to the true class beyond which
  // the batch is redrawn with forward annealing only
  double fallback_threshold = 0.8;
  bool parallel = true;
};

struct EpochResult {
  NetworkParams params;
  double train_error = 0.0;
  int fallback_count = 0;  // images whose cyclic batch was redrawn forward
};

// One pass over the dataset in seed-shuffled order, online updates.
// train_error is the misclassification fraction of the free samples drawn
// during the pass (no separate inference).
EpochResult train_epoch(const NetworkParams& params, const Dataset& dataset,
                        const TrainOptions& options);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_error = 0.0;
  double test_error = 0.0;
  double wall_seconds = 0.0;
};

struct TrainRun {
  std::string method;
  int m = 1;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_hash;
  std::vector<EpochRecord> records;
};

// Multi-epoch driver; test error comes from infer() over the test set with
// per-image derived seeds. record_wall_time=false writes zeros, keeping the
// emitted CSV byte-reproducible.
TrainRun train(NetworkParams& params, const Dataset& train_set, const Dataset& test_set,
               int epochs, const TrainOptions& options, bool record_wall_time = false);

double evaluate_error(const NetworkParams& params, const Dataset& dataset,
                      const AnnealConfig& sampler, std::uint64_t seed, bool parallel = true);

}  // namespace spinnet
