#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spinnet/errors.hpp"

namespace spinnet {

// A +-1 assignment to every free spin of a problem. Indexing is positional.
struct SpinState {
  std::vector<std::int8_t> spins;

  SpinState() = default;
  explicit SpinState(std::vector<std::int8_t> s) : spins(std::move(s)) {}
  SpinState(std::initializer_list<int> values) {
    spins.reserve(values.size());
    for (int v : values) spins.push_back(static_cast<std::int8_t>(v));
  }
  static SpinState filled(int n, std::int8_t value) {
    return SpinState(std::vector<std::int8_t>(static_cast<std::size_t>(n), value));
  }

  int size() const { return static_cast<int>(spins.size()); }
  std::int8_t operator[](int i) const { return spins[static_cast<std::size_t>(i)]; }
  std::int8_t& operator[](int i) { return spins[static_cast<std::size_t>(i)]; }

  bool operator==(const SpinState& o) const { return spins == o.spins; }
  // lexicographic with -1 < +1; used for deterministic tie-breaking
  bool operator<(const SpinState& o) const { return spins < o.spins; }

  void validate() const;  // every entry exactly +1 or -1
};

int hamming(const SpinState& a, const SpinState& b);

struct Coupling {
  int i;
  int j;
  double value;
};

// Half-open index range of one layer inside the spin ordering.
struct LayerSpan {
  int begin;
  int end;
};

// Sparse Ising Hamiltonian  H = sum_{(i,j)} J_ij s_i s_j + sum_i b_i s_i,
// minimized over +-1 assignments. Immutable after construction.
//
// frozen[i] in {-1,0,+1}: nonzero pins spin i at that value. Frozen spins
// are excluded from optimization but their energy contributions are kept,
// so totals stay comparable across partial anneals.
class IsingProblem {
 public:
  IsingProblem(int n_spins, std::vector<Coupling> couplings, std::vector<double> biases,
               std::vector<std::int8_t> frozen = {}, std::vector<LayerSpan> layers = {});

  int n_spins() const { return n_spins_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const std::vector<double>& biases() const { return biases_; }
  const std::vector<std::int8_t>& frozen() const { return frozen_; }
  const std::vector<LayerSpan>& layers() const { return layers_; }
  bool has_frozen() const { return n_frozen_ > 0; }
  int n_frozen() const { return n_frozen_; }
  int n_free() const { return n_spins_ - n_frozen_; }

  // CSR adjacency (neighbor spin, coupling value), used by samplers
  const std::vector<int>& adj_offsets() const { return adj_offsets_; }
  const std::vector<std::pair<int, double>>& adj() const { return adj_; }
  int degree(int i) const { return adj_offsets_[i + 1] - adj_offsets_[i]; }

  double energy(const SpinState& state) const;

  // b_i + sum_j J_ij s_j
  double local_field(const SpinState& state, int i) const;

  // checks length and frozen agreement, throws DimensionError/ContractError
  void check_state(const SpinState& state) const;

 private:
  int n_spins_;
  int n_frozen_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<double> biases_;
  std::vector<std::int8_t> frozen_;
  std::vector<LayerSpan> layers_;
  std::vector<int> adj_offsets_;
  std::vector<std::pair<int, double>> adj_;
};

inline constexpr int kEnumerationLimit = 24;

// Exact minimizer by enumeration; ties resolved to the lexicographically
// smallest state (-1 before +1). Free spins <= enum_limit, or two-layer
// problems whose smaller free side is <= enum_limit (the other side is
// closed per-spin by the sign of its local field). enum_limit is a test
// hook; callers use the default.
std::pair<SpinState, double> brute_force_ground_state(const IsingProblem& problem,
                                                      int enum_limit = kEnumerationLimit);

// k lowest-energy states, energy-ascending, ties lexicographic.
// k > 2^free truncates to the full spectrum.
std::vector<std::pair<SpinState, double>> low_energy_spectrum(const IsingProblem& problem, int k,
                                                              int enum_limit = kEnumerationLimit);

// Line-oriented text format: "ising <n>", then "c i j J", "b i value",
// "f i +-1", "l begin end" records. Exact round-trip.
void save_problem(const IsingProblem& problem, std::ostream& out);
IsingProblem load_problem(std::istream& in);
void save_problem_file(const IsingProblem& problem, const std::string& path);
IsingProblem load_problem_file(const std::string& path);

}  // namespace spinnet
