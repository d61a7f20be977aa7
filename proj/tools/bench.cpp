// Serial vs OpenMP timings for the three data-parallel kernels: batch
// annealing, the pairwise Hamming matrix, and state-vector propagation.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinnet/analysis.hpp"
#include "spinnet/coherent.hpp"
#include "spinnet/ising.hpp"
#include "spinnet/network.hpp"
#include "spinnet/rng.hpp"
#include "spinnet/sampler.hpp"
#include "spinnet/trainer.hpp"

using namespace spinnet;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-24s serial %8.3f s   parallel %8.3f s   speedup %.2fx\n", name, serial_s,
              parallel_s, parallel_s > 0.0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n");
#endif

  // 160-spin network problem, the full-scale sampler workload
  NetworkParams params = init_params(64, 120, 10, 4, 7);
  InputImage img;
  img.pixels.resize(64);
  Rng rng(11);
  for (auto& x : img.pixels) x = rng.uniform();
  IsingProblem problem = build_system_hamiltonian(params, img);

  AnnealConfig cfg = fast_config(3);
  const int m = 24;
  auto t0 = std::chrono::steady_clock::now();
  SampleBatch serial = sample_batch_serial(problem, {}, m, cfg);
  double batch_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  SampleBatch parallel = sample_batch(problem, {}, m, cfg, true);
  double batch_parallel = seconds_since(t0);
  bool same = serial.states == parallel.states && serial.energies == parallel.energies;
  report("sample_batch (m=24)", batch_serial, batch_parallel);
  std::printf("  parallel == serial: %s\n", same ? "yes" : "NO (bug)");

  // pairwise Hamming matrix over 600 sampled states
  std::vector<SpinState> states;
  for (int k = 0; k < 600; ++k) {
    SpinState s = SpinState::filled(160, 1);
    Rng r(derive_seed(5, static_cast<std::uint64_t>(k)));
    for (int i = 0; i < s.size(); ++i) s[i] = r.coin() ? 1 : -1;
    states.push_back(std::move(s));
  }
  t0 = std::chrono::steady_clock::now();
  auto d_serial = hamming_matrix_serial(states);
  double ham_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  auto d_parallel = hamming_matrix(states, true);
  double ham_parallel = seconds_since(t0);
  report("hamming_matrix (600)", ham_serial, ham_parallel);
  std::printf("  parallel == serial: %s\n", d_serial == d_parallel ? "yes" : "NO (bug)");

  // 14-qubit annealing evolution
  NetworkParams tiny = init_params(4, 6, 2, 4, 9);
  InputImage tiny_img;
  tiny_img.pixels = {0.1, 0.9, 0.3, 0.7};
  IsingProblem tiny_problem = build_system_hamiltonian(tiny, tiny_img);
  AnnealSchedule schedule;
  schedule.t_f = 10.0;
  schedule.n_steps = 200;
  t0 = std::chrono::steady_clock::now();
  QuantumState psi = anneal_evolve(tiny_problem, schedule);
  double evolve_s = seconds_since(t0);
  std::printf("%-24s %8.3f s (norm %.12f)\n", "anneal_evolve (14q)", evolve_s, psi.norm());

  return 0;
}
