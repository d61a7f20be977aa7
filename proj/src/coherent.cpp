#include "spinnet/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinnet {

namespace {
constexpr int kMaxQubits = 16;
constexpr double kDriftTolerance = 1e-6;
}  // namespace

int QuantumState::n_qubits() const {
  std::size_t d = amp.size();
  int n = 0;
  while ((1ULL << n) < d) ++n;
  if (d == 0 || (1ULL << n) != d) throw DimensionError("amplitude vector is not a power of two");
  return n;
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

void QuantumState::normalize() {
  double n = norm();
  if (n == 0.0) throw ContractError("cannot normalize the zero state");
  for (auto& a : amp) a /= n;
}

QuantumState QuantumState::uniform(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw CapacityError("qubit count out of range");
  QuantumState s;
  s.amp.assign(1ULL << n_qubits, 1.0 / std::sqrt(static_cast<double>(1ULL << n_qubits)));
  return s;
}

QuantumState QuantumState::basis(int n_qubits, std::uint32_t index) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw CapacityError("qubit count out of range");
  QuantumState s;
  s.amp.assign(1ULL << n_qubits, 0.0);
  s.amp[index] = 1.0;
  return s;
}

SpinState basis_spins(int n_qubits, std::uint32_t index) {
  SpinState s = SpinState::filled(n_qubits, 1);
  for (int q = 0; q < n_qubits; ++q)
    if (index & (1u << q)) s[q] = -1;
  return s;
}

std::uint32_t basis_index(const SpinState& state) {
  std::uint32_t idx = 0;
  for (int q = 0; q < state.size(); ++q)
    if (state[q] == -1) idx |= (1u << q);
  return idx;
}

void AnnealSchedule::validate() const {
  if (t_f <= 0.0) throw ConfigError("t_f must be positive");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (s_table.size() < 2) throw ConfigError("s table needs at least two entries");
  if (s_table.front() != 0.0 || s_table.back() != 1.0)
    throw ConfigError("s table must start at 0 and end at 1");
  for (std::size_t k = 1; k < s_table.size(); ++k)
    if (s_table[k] < s_table[k - 1]) throw ConfigError("s table must be non-decreasing");
}

double AnnealSchedule::s_of(double t) const {
  if (t <= 0.0) return s_table.front();
  if (t >= t_f) return s_table.back();
  double x = t / t_f * static_cast<double>(s_table.size() - 1);
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(x), s_table.size() - 2);
  double frac = x - static_cast<double>(k);
  return s_table[k] + frac * (s_table[k + 1] - s_table[k]);
}

namespace {

// Diagonal of the problem Hamiltonian in the bit=0 <-> +1 convention.
std::vector<double> diagonal_energies(const IsingProblem& problem) {
  const int n = problem.n_spins();
  if (n < 1 || n > kMaxQubits)
    throw CapacityError("state-vector simulation limited to 16 spins");
  const std::size_t dim = 1ULL << n;
  std::vector<double> diag(dim, 0.0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    double e = 0.0;
    for (const auto& c : problem.couplings()) {
      double si = (idx >> c.i) & 1 ? -1.0 : 1.0;
      double sj = (idx >> c.j) & 1 ? -1.0 : 1.0;
      e += c.value * si * sj;
    }
    for (int i = 0; i < n; ++i)
      e += problem.biases()[i] * ((idx >> i) & 1 ? -1.0 : 1.0);
    diag[idx] = e;
  }
  return diag;
}

using Cvec = std::vector<std::complex<double>>;

// out = H v with H = -(1-s) sum_q X_q + s * diag
void apply_hamiltonian(const Cvec& v, Cvec& out, const std::vector<double>& diag, double s, int n) {
  const std::size_t dim = v.size();
  const double xw = -(1.0 - s);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (dim >= 4096)
#endif
  for (long long k = 0; k < static_cast<long long>(dim); ++k) {
    std::complex<double> acc = s * diag[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    for (int q = 0; q < n; ++q)
      acc += xw * v[static_cast<std::size_t>(k) ^ (1ULL << q)];
    out[static_cast<std::size_t>(k)] = acc;
  }
}

// v <- exp(phase * dt * H) v by Taylor series, converged to machine precision.
// phase is -i for forward and +i for reversed evolution.
void expm_step(Cvec& v, const std::vector<double>& diag, double s, int n, double dt,
               std::complex<double> phase, double hnorm_bound) {
  const int n_sub = std::max(1, static_cast<int>(std::ceil(dt * hnorm_bound / 2.0)));
  const double dt_sub = dt / n_sub;
  Cvec term(v.size()), next(v.size());
  for (int sub = 0; sub < n_sub; ++sub) {
    term = v;
    double vnorm2 = 0.0;
    for (const auto& a : v) vnorm2 += std::norm(a);
    for (int m = 1; m <= 200; ++m) {
      apply_hamiltonian(term, next, diag, s, n);
      const std::complex<double> coeff = phase * dt_sub / static_cast<double>(m);
      double tnorm2 = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        term[k] = coeff * next[k];
        v[k] += term[k];
        tnorm2 += std::norm(term[k]);
      }
      if (tnorm2 <= 1e-32 * vnorm2) break;
      if (m == 200) throw IntegrationError("matrix exponential series failed to converge");
    }
  }
}

struct Evolver {
  const IsingProblem& problem;
  const AnnealSchedule& schedule;
  std::vector<double> diag;
  double max_abs_diag;

  Evolver(const IsingProblem& p, const AnnealSchedule& sch) : problem(p), schedule(sch) {
    schedule.validate();
    diag = diagonal_energies(problem);
    max_abs_diag = 0.0;
    for (double d : diag) max_abs_diag = std::max(max_abs_diag, std::abs(d));
  }

  QuantumState run(const QuantumState& initial, bool reversed) const {
    const int n = problem.n_spins();
    if (static_cast<int>(initial.amp.size()) != (1 << n))
      throw DimensionError("state dimension does not match problem spin count");
    if (std::abs(initial.norm() - 1.0) > 1e-6) throw ContractError("initial state not normalized");

    QuantumState out = initial;
    const double dt = schedule.t_f / schedule.n_steps;
    const double hbound = static_cast<double>(n) + max_abs_diag;
    const std::complex<double> phase = reversed ? std::complex<double>(0.0, 1.0)
                                                : std::complex<double>(0.0, -1.0);
    for (int step = 0; step < schedule.n_steps; ++step) {
      int j = reversed ? schedule.n_steps - 1 - step : step;
      double t_mid = (j + 0.5) * dt;
      expm_step(out.amp, diag, schedule.s_of(t_mid), n, dt, phase, hbound);
      double drift = std::abs(out.norm() - 1.0);
      if (drift > kDriftTolerance)
        throw IntegrationError("normalization drift " + std::to_string(drift) +
                               " exceeds tolerance at step " + std::to_string(j));
    }
    out.normalize();
    return out;
  }
};

}  // namespace

QuantumState anneal_evolve(const IsingProblem& problem, const AnnealSchedule& schedule,
                           const QuantumState& initial) {
  return Evolver(problem, schedule).run(initial, false);
}

QuantumState anneal_evolve(const IsingProblem& problem, const AnnealSchedule& schedule) {
  return anneal_evolve(problem, schedule, QuantumState::uniform(problem.n_spins()));
}

QuantumState anneal_evolve_inverse(const IsingProblem& problem, const AnnealSchedule& schedule,
                                   const QuantumState& state) {
  return Evolver(problem, schedule).run(state, true);
}

std::vector<std::uint8_t> target_mask(const NetworkParams& params, int y, AmplifyTarget target) {
  const int n = params.n_spins();
  if (n > kMaxQubits) throw CapacityError("state-vector simulation limited to 16 spins");
  if (y < 0 || y >= params.n_classes) throw ContractError("class index out of range");
  const std::size_t dim = 1ULL << n;
  std::vector<std::uint8_t> mask(dim, 0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int cls = decode(basis_spins(n, static_cast<std::uint32_t>(idx)), params);
    bool correct = cls == y;
    mask[idx] = (target == AmplifyTarget::correct) == correct;
  }
  return mask;
}

Decomposition decompose(const QuantumState& state, const NetworkParams& params, int y) {
  const int n = params.n_spins();
  if (static_cast<int>(state.amp.size()) != (1 << n))
    throw DimensionError("state dimension does not match the network spin count");
  auto mask = target_mask(params, y, AmplifyTarget::correct);

  Decomposition d;
  QuantumState correct, wrong;
  correct.amp.assign(state.amp.size(), 0.0);
  wrong.amp.assign(state.amp.size(), 0.0);
  double p = 0.0;
  for (std::size_t k = 0; k < state.amp.size(); ++k) {
    if (mask[k]) {
      correct.amp[k] = state.amp[k];
      p += std::norm(state.amp[k]);
    } else {
      wrong.amp[k] = state.amp[k];
    }
  }
  d.p_correct = p;
  if (p > 0.0) {
    correct.normalize();
    d.psi_correct = std::move(correct);
  }
  if (p < 1.0 && wrong.norm() > 0.0) {
    wrong.normalize();
    d.psi_wrong = std::move(wrong);
  }
  return d;
}

namespace {

int grover_iterations(double p) {
  double theta = std::asin(std::sqrt(p));
  long long k = std::llround(std::numbers::pi / (4.0 * theta) - 0.5);
  return static_cast<int>(std::max(0LL, k));
}

void mark(Cvec& v, const std::vector<std::uint8_t>& mask) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (mask[k]) v[k] = -v[k];
}

// v <- (2|psi><psi| - 1) v
void reflect_about(Cvec& v, const Cvec& psi) {
  std::complex<double> ip = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) ip += std::conj(psi[k]) * v[k];
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 2.0 * ip * psi[k] - v[k];
}

double masked_weight(const Cvec& v, const std::vector<std::uint8_t>& mask) {
  double p = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (mask[k]) p += std::norm(v[k]);
  return p;
}

}  // namespace

AmplifyResult amplitude_amplify(const IsingProblem& problem, const AnnealSchedule& schedule,
                                const NetworkParams& params, int y, AmplifyTarget target) {
  Evolver ev(problem, schedule);
  QuantumState psi0 = QuantumState::uniform(problem.n_spins());
  QuantumState psi = ev.run(psi0, false);
  auto mask = target_mask(params, y, target);

  double p = masked_weight(psi.amp, mask);
  if (p <= 0.0) throw ContractError("target component has zero weight");

  AmplifyResult res;
  res.k = grover_iterations(p);
  res.oracle_queries = 1;  // the preparation run
  res.state = psi;
  for (int it = 0; it < res.k; ++it) {
    mark(res.state.amp, mask);
    res.state = ev.run(res.state, true);
    reflect_about(res.state.amp, psi0.amp);
    res.state = ev.run(res.state, false);
    res.oracle_queries += 2;
  }
  res.success_prob = masked_weight(res.state.amp, mask);
  return res;
}

AmplifyResult amplitude_amplify_state(const QuantumState& psi,
                                      const std::vector<std::uint8_t>& target_mask) {
  if (psi.amp.size() != target_mask.size()) throw DimensionError("mask dimension mismatch");
  double p = masked_weight(psi.amp, target_mask);
  if (p <= 0.0) throw ContractError("target component has zero weight");

  AmplifyResult res;
  res.k = grover_iterations(p);
  res.oracle_queries = 1;
  res.state = psi;
  for (int it = 0; it < res.k; ++it) {
    mark(res.state.amp, target_mask);
    reflect_about(res.state.amp, psi.amp);
    res.oracle_queries += 2;
  }
  res.success_prob = masked_weight(res.state.amp, target_mask);
  return res;
}

FreeStats expectation_update_inputs(const QuantumState& psi, int n_hidden, int n_output) {
  const int n = psi.n_qubits();
  if (n != n_hidden + n_output) throw DimensionError("qubit count != n_hidden + n_output");

  FreeStats st;
  st.hidden_mean.assign(static_cast<std::size_t>(n_hidden), 0.0);
  st.output_mean.assign(static_cast<std::size_t>(n_output), 0.0);
  st.correlator.assign(static_cast<std::size_t>(n_hidden) * n_output, 0.0);
  for (std::size_t idx = 0; idx < psi.amp.size(); ++idx) {
    double p = std::norm(psi.amp[idx]);
    if (p == 0.0) continue;
    for (int i = 0; i < n_hidden; ++i) {
      double zi = (idx >> i) & 1 ? -1.0 : 1.0;
      st.hidden_mean[static_cast<std::size_t>(i)] += p * zi;
      for (int a = 0; a < n_output; ++a) {
        double za = (idx >> (n_hidden + a)) & 1 ? -1.0 : 1.0;
        st.correlator[static_cast<std::size_t>(i) * n_output + a] += p * zi * za;
      }
    }
    for (int a = 0; a < n_output; ++a)
      st.output_mean[static_cast<std::size_t>(a)] += p * ((idx >> (n_hidden + a)) & 1 ? -1.0 : 1.0);
  }
  return st;
}

}  // namespace spinnet
