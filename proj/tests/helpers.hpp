#pragma once

#include <vector>

#include "spinnet/ising.hpp"
#include "spinnet/network.hpp"
#include "spinnet/rng.hpp"

namespace spinnet::test {

inline SpinState random_state(Rng& rng, int n) {
  SpinState s = SpinState::filled(n, 1);
  for (int i = 0; i < n; ++i) s[i] = rng.coin() ? 1 : -1;
  return s;
}

inline IsingProblem random_problem(Rng& rng, int n, double density = 0.5,
                                   double scale = 1.0) {
  std::vector<Coupling> couplings;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) couplings.push_back({i, j, rng.uniform(-scale, scale)});
  std::vector<double> bias(static_cast<std::size_t>(n));
  for (auto& b : bias) b = rng.uniform(-scale, scale);
  return IsingProblem(n, std::move(couplings), std::move(bias));
}

// independent straight-line energy oracle: dense matrix, double loop
inline double naive_energy(const IsingProblem& p, const SpinState& s) {
  const int n = p.n_spins();
  std::vector<std::vector<double>> J(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& c : p.couplings()) {
    J[static_cast<std::size_t>(c.i)][static_cast<std::size_t>(c.j)] = c.value;
  }
  double e = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e += J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * s[i] * s[j];
  for (int i = 0; i < n; ++i) e += p.biases()[i] * s[i];
  return e;
}

// full enumeration oracle: every state evaluated with energy(), stable sort
inline std::vector<std::pair<SpinState, double>> naive_spectrum(const IsingProblem& p) {
  const int n = p.n_spins();
  std::vector<std::pair<SpinState, double>> all;
  for (std::uint64_t code = 0; code < (1ULL << n); ++code) {
    SpinState s = SpinState::filled(n, 0);
    for (int i = 0; i < n; ++i)
      s[i] = (code >> (n - 1 - i)) & 1 ? std::int8_t{1} : std::int8_t{-1};
    bool ok = true;
    for (int i = 0; i < n; ++i)
      if (p.frozen()[i] != 0 && s[i] != p.frozen()[i]) ok = false;
    if (!ok) continue;
    all.push_back({s, p.energy(s)});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return all;
}

inline NetworkParams random_net(Rng& rng, int n_input, int n_hidden, int n_classes,
                                int redundancy, double scale = 0.3) {
  NetworkParams p = zero_params(n_input, n_hidden, n_classes, redundancy);
  for (auto& v : p.W) v = rng.uniform(-scale, scale);
  for (auto& v : p.J) v = rng.uniform(-scale, scale);
  for (auto& v : p.b_h) v = rng.uniform(-scale / 4, scale / 4);
  for (auto& v : p.b_o) v = rng.uniform(-scale / 4, scale / 4);
  return p;
}

inline InputImage random_image(Rng& rng, int n_pixels, int label = -1) {
  InputImage img;
  img.label = label;
  img.pixels.resize(static_cast<std::size_t>(n_pixels));
  for (auto& x : img.pixels) x = rng.uniform();
  return img;
}

}  // namespace spinnet::test
