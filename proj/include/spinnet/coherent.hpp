#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "spinnet/ising.hpp"
#include "spinnet/network.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

// Dense state vector over n <= 16 spins. Basis index bit q holds spin q;
// bit = 0 means spin +1, bit = 1 means spin -1.
struct QuantumState {
  std::vector<std::complex<double>> amp;

  int n_qubits() const;
  double norm() const;
  void normalize();

  static QuantumState uniform(int n_qubits);
  static QuantumState basis(int n_qubits, std::uint32_t index);
};

SpinState basis_spins(int n_qubits, std::uint32_t index);
std::uint32_t basis_index(const SpinState& state);

// Interpolated annealing fraction s(t): tabulated at uniform times over
// [0, t_f] with s(0)=0 and s(t_f)=1; n_steps propagation steps.
struct AnnealSchedule {
  double t_f = 20.0;
  int n_steps = 1000;
  std::vector<double> s_table = {0.0, 1.0};

  void validate() const;
  double s_of(double t) const;
};

// Schroedinger evolution under H(t) = -(1-s(t)) sum_q X_q + s(t) H_problem,
// piecewise-constant per step with the exact per-step matrix exponential
// applied by converged Taylor expansion. The x-polarized uniform
// superposition is the ground state of the driver.
QuantumState anneal_evolve(const IsingProblem& problem, const AnnealSchedule& schedule,
                           const QuantumState& initial);
QuantumState anneal_evolve(const IsingProblem& problem, const AnnealSchedule& schedule);

// Exact inverse of anneal_evolve: the step unitaries applied conjugated, in
// reverse order (annealing run backwards in time).
QuantumState anneal_evolve_inverse(const IsingProblem& problem, const AnnealSchedule& schedule,
                                   const QuantumState& state);

struct Decomposition {
  double p_correct = 0.0;
  std::optional<QuantumState> psi_correct;  // absent when its weight is zero
  std::optional<QuantumState> psi_wrong;
};

// Split against the decoded class of each basis string: "correct" support
// decodes to y, "wrong" is everything else.
Decomposition decompose(const QuantumState& state, const NetworkParams& params, int y);

enum class AmplifyTarget { correct, wrong };

struct AmplifyResult {
  QuantumState state;
  int k = 0;              // Grover iterations
  int oracle_queries = 0; // evolution-operator applications, 2k+1
  double success_prob = 0.0;
};

// Amplitude amplification of the target component of the annealed state.
// Each iteration marks the target subspace, un-anneals, reflects about the
// initial superposition and re-anneals; k = round(pi/(4 asin sqrt(p)) - 1/2).
AmplifyResult amplitude_amplify(const IsingProblem& problem, const AnnealSchedule& schedule,
                                const NetworkParams& params, int y, AmplifyTarget target);

// Same rotation applied to an externally prepared state with a direct
// reflection about it; used to study exact target weights. Reflection cost
// is booked as two evolution applications.
AmplifyResult amplitude_amplify_state(const QuantumState& psi,
                                      const std::vector<std::uint8_t>& target_mask);

// Marks basis strings whose decode equals y (or differs, for wrong).
std::vector<std::uint8_t> target_mask(const NetworkParams& params, int y, AmplifyTarget target);

// Exact <Z_i>, <Z_alpha> and <Z_i Z_alpha> of the state, in the same layout
// dragon updates consume.
FreeStats expectation_update_inputs(const QuantumState& psi, int n_hidden, int n_output);

}  // namespace spinnet
