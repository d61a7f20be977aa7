#pragma once

#include <cstdint>

#include "spinnet/dataset.hpp"
#include "spinnet/network.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

// Classical baseline on the same architecture and tensors: real-valued
// units, ReLU hidden layer, logits formed by the same redundancy-group sums,
// softmax cross-entropy, mini-batch SGD.
struct BackpropHyper {
  double learning_rate = 0.05;
  int batch_size = 10;

  void validate() const;
};

struct MlpGradients {
  std::vector<double> W, J, b_h, b_o;  // same shapes as NetworkParams
};

// Mean loss over the batch; used for finite-difference checks.
double mlp_loss(const NetworkParams& params, const std::vector<const InputImage*>& batch);

// Analytic gradient of mlp_loss in the same tensor layout.
MlpGradients mlp_gradient(const NetworkParams& params, const std::vector<const InputImage*>& batch);

// Prediction: unique argmax of the group-summed logits, -1 on ties.
int mlp_predict(const NetworkParams& params, const InputImage& image);

TrainRun backprop_train(NetworkParams& params, const Dataset& train_set, const Dataset& test_set,
                        int epochs, const BackpropHyper& hyper, std::uint64_t seed,
                        bool record_wall_time = false);

}  // namespace spinnet
