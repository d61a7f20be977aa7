#pragma once

#include <cstdint>
#include <vector>

#include "spinnet/dataset.hpp"
#include "spinnet/network.hpp"
#include "spinnet/sampler.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

// Multi-layer network: couplings only between adjacent layers, input image
// coupled into layer 0 through W. The last layer is the output layer.
struct DeepNetworkParams {
  int n_input = 0;
  std::vector<int> layer_sizes;          // n_1..n_L
  std::vector<double> W;                 // layer_sizes[0] x n_input
  std::vector<std::vector<double>> J;    // J[l]: sizes[l] x sizes[l+1]
  std::vector<std::vector<double>> b;    // b[l]: sizes[l]
  int n_classes = 0;
  int redundancy = 0;

  int n_layers() const { return static_cast<int>(layer_sizes.size()); }
  int n_spins() const;
  int layer_offset(int l) const;  // first spin index of layer l
  void validate() const;
};

DeepNetworkParams init_deep_params(int n_input, std::vector<int> layer_sizes, int n_classes,
                                   int redundancy, std::uint64_t seed);

// Full Hamiltonian of the deep net on `image`. Layers not listed in
// `active_layers` (when non-empty) are frozen at the values of `pinned`.
// nudge_y >= 0 adds the output-layer nudge at `nudge_strength`.
IsingProblem build_deep_hamiltonian(const DeepNetworkParams& params, const InputImage& image,
                                    const std::vector<int>& active_layers = {},
                                    const SpinState& pinned = SpinState{}, int nudge_y = -1,
                                    double nudge_strength = 1.0);

// Layer-by-layer greedy configuration: each spin set to -sign of the local
// field from the layers already placed. Deterministic starting point for
// the forward sweep.
SpinState greedy_deep_state(const DeepNetworkParams& params, const InputImage& image);

int deep_decode(const SpinState& state, const DeepNetworkParams& params);

struct DeepPassOptions {
  int m = 5;
  LearningRates rates;
  AnnealConfig sampler;
  std::uint64_t seed = 0;
  double nudge_strength = 1.0;
  bool parallel = true;
};

struct DeepPassResult {
  DeepNetworkParams params;
  SpinState free_config;  // configuration after the forward sweep
  int predicted = -1;
};

// One forward sweep (anneal active pairs (1,2),(2,3),... with the rest
// frozen) followed by one backward sweep over pairs (L-1,L),...,(1,2) that
// samples m free states plus a nudge state per pair and applies the
// averaged update to that pair's parameters.
DeepPassResult deep_sweep_pass(const DeepNetworkParams& params, const InputImage& image, int y,
                               const DeepPassOptions& options);

// Inference = forward sweep only.
int deep_infer(const DeepNetworkParams& params, const InputImage& image,
               const DeepPassOptions& options);

struct DeepTrainRecord {
  int pass = 0;
  double train_error = 0.0;
  double test_error = 0.0;
};

// Online pass-based training: pass k presents one image (seed-shuffled,
// every image once per cycle); errors are re-evaluated over the whole sets
// after each pass. Stops early once the training error reaches zero.
std::vector<DeepTrainRecord> deep_train(DeepNetworkParams& params, const Dataset& dataset,
                                        int n_passes, const DeepPassOptions& options,
                                        const Dataset* test_set = nullptr);

}  // namespace spinnet
