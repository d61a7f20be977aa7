#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spinnet/ising.hpp"
#include "spinnet/sampler.hpp"

namespace spinnet {

// Trainable tensors of the three-layer network. Spin order in every built
// Hamiltonian is hidden first, then output.
struct NetworkParams {
  int n_input = 0;
  int n_hidden = 0;
  int n_output = 0;  // n_classes * redundancy
  int n_classes = 0;
  int redundancy = 0;

  std::vector<double> W;    // n_hidden x n_input, row-major
  std::vector<double> J;    // n_hidden x n_output, row-major
  std::vector<double> b_h;  // n_hidden
  std::vector<double> b_o;  // n_output

  double& w(int i, int a) { return W[static_cast<std::size_t>(i) * n_input + a]; }
  double w(int i, int a) const { return W[static_cast<std::size_t>(i) * n_input + a]; }
  double& j(int i, int alpha) { return J[static_cast<std::size_t>(i) * n_output + alpha]; }
  double j(int i, int alpha) const { return J[static_cast<std::size_t>(i) * n_output + alpha]; }

  int n_spins() const { return n_hidden + n_output; }
  void validate() const;
};

NetworkParams zero_params(int n_input, int n_hidden, int n_classes, int redundancy);

struct InputImage {
  std::vector<double> pixels;  // values in [0,1]
  int label = -1;              // class in 0..n_classes-1, or -1 if unknown
};

// n_alpha[y]: +1 on class y's redundancy group, -1 elsewhere
std::vector<std::int8_t> nudge_vector(const NetworkParams& params, int y);

// h_i = sum_a W_ia x_a
std::vector<double> encode_bias(const NetworkParams& params, const InputImage& image);

IsingProblem build_system_hamiltonian(const NetworkParams& params, const InputImage& image);

// system Hamiltonian with output bias alpha shifted to
// b_o[alpha] - nudge_strength * n_alpha[y]
IsingProblem build_nudge_hamiltonian(const NetworkParams& params, const InputImage& image, int y,
                                     double nudge_strength = 1.0);

// Group sums over `redundancy` consecutive output spins; unique argmax, or
// -1 when the maximum ties (unclassified).
int decode_groups(std::span<const std::int8_t> output_spins, int n_classes, int redundancy);
int decode(const SpinState& state, const NetworkParams& params);

// Analytic nudge state: output spins pinned at n_alpha[y], hidden spin i at
// -sign(sum_alpha J_i,alpha n_alpha + b_h_i + h_i[x]), sign(0) -> +1.
SpinState nudge_state(const NetworkParams& params, const InputImage& image, int y);

// Nudge states of the n_classes-1 wrong classes, ascending class order.
std::vector<SpinState> wrong_basin_references(const NetworkParams& params,
                                              const InputImage& image, int y);

int infer(const NetworkParams& params, const InputImage& image, const AnnealConfig& sampler);

}  // namespace spinnet
