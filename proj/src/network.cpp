#include "spinnet/network.hpp"

#include <cmath>

namespace spinnet {

void NetworkParams::validate() const {
  if (n_input < 1 || n_hidden < 1 || n_classes < 1 || redundancy < 1)
    throw ContractError("network dimensions must be positive");
  if (n_output != n_classes * redundancy)
    throw ContractError("n_output must equal n_classes * redundancy");
  if (static_cast<int>(W.size()) != n_hidden * n_input ||
      static_cast<int>(J.size()) != n_hidden * n_output ||
      static_cast<int>(b_h.size()) != n_hidden || static_cast<int>(b_o.size()) != n_output)
    throw DimensionError("parameter tensor shape mismatch");
  for (double v : W)
    if (!std::isfinite(v)) throw ContractError("non-finite entry in W");
  for (double v : J)
    if (!std::isfinite(v)) throw ContractError("non-finite entry in J");
  for (double v : b_h)
    if (!std::isfinite(v)) throw ContractError("non-finite entry in b_h");
  for (double v : b_o)
    if (!std::isfinite(v)) throw ContractError("non-finite entry in b_o");
}

NetworkParams zero_params(int n_input, int n_hidden, int n_classes, int redundancy) {
  NetworkParams p;
  p.n_input = n_input;
  p.n_hidden = n_hidden;
  p.n_classes = n_classes;
  p.redundancy = redundancy;
  p.n_output = n_classes * redundancy;
  p.W.assign(static_cast<std::size_t>(n_hidden) * n_input, 0.0);
  p.J.assign(static_cast<std::size_t>(n_hidden) * p.n_output, 0.0);
  p.b_h.assign(static_cast<std::size_t>(n_hidden), 0.0);
  p.b_o.assign(static_cast<std::size_t>(p.n_output), 0.0);
  return p;
}

std::vector<std::int8_t> nudge_vector(const NetworkParams& params, int y) {
  if (y < 0 || y >= params.n_classes) throw ContractError("class index out of range");
  std::vector<std::int8_t> n(static_cast<std::size_t>(params.n_output), -1);
  for (int r = 0; r < params.redundancy; ++r)
    n[static_cast<std::size_t>(y * params.redundancy + r)] = 1;
  return n;
}

std::vector<double> encode_bias(const NetworkParams& params, const InputImage& image) {
  if (static_cast<int>(image.pixels.size()) != params.n_input)
    throw DimensionError("pixel count does not match n_input");
  std::vector<double> h(static_cast<std::size_t>(params.n_hidden), 0.0);
  for (int i = 0; i < params.n_hidden; ++i) {
    double acc = 0.0;
    const double* row = params.W.data() + static_cast<std::size_t>(i) * params.n_input;
    for (int a = 0; a < params.n_input; ++a) acc += row[a] * image.pixels[static_cast<std::size_t>(a)];
    h[static_cast<std::size_t>(i)] = acc;
  }
  return h;
}

namespace {

IsingProblem build_hamiltonian(const NetworkParams& params, const InputImage& image,
                               const std::int8_t* nudge, double nudge_strength) {
  params.validate();
  std::vector<double> h = encode_bias(params, image);
  const int nh = params.n_hidden, no = params.n_output;

  std::vector<Coupling> couplings;
  couplings.reserve(static_cast<std::size_t>(nh) * no);
  for (int i = 0; i < nh; ++i)
    for (int alpha = 0; alpha < no; ++alpha)
      if (double v = params.j(i, alpha); v != 0.0) couplings.push_back({i, nh + alpha, v});

  std::vector<double> bias(static_cast<std::size_t>(nh + no));
  for (int i = 0; i < nh; ++i) bias[static_cast<std::size_t>(i)] = params.b_h[i] + h[i];
  for (int alpha = 0; alpha < no; ++alpha) {
    double b = params.b_o[alpha];
    if (nudge) b -= nudge_strength * nudge[alpha];
    bias[static_cast<std::size_t>(nh + alpha)] = b;
  }

  return IsingProblem(nh + no, std::move(couplings), std::move(bias), {},
                      {{0, nh}, {nh, nh + no}});
}

}  // namespace

IsingProblem build_system_hamiltonian(const NetworkParams& params, const InputImage& image) {
  return build_hamiltonian(params, image, nullptr, 0.0);
}

IsingProblem build_nudge_hamiltonian(const NetworkParams& params, const InputImage& image, int y,
                                     double nudge_strength) {
  auto n = nudge_vector(params, y);
  return build_hamiltonian(params, image, n.data(), nudge_strength);
}

int decode_groups(std::span<const std::int8_t> output_spins, int n_classes, int redundancy) {
  int best = -1, best_sum = 0;
  bool tie = false;
  for (int c = 0; c < n_classes; ++c) {
    int sum = 0;
    for (int r = 0; r < redundancy; ++r) sum += output_spins[static_cast<std::size_t>(c * redundancy + r)];
    if (c == 0 || sum > best_sum) {
      best = c;
      best_sum = sum;
      tie = false;
    } else if (sum == best_sum) {
      tie = true;
    }
  }
  return tie ? -1 : best;
}

int decode(const SpinState& state, const NetworkParams& params) {
  if (state.size() != params.n_spins()) throw DimensionError("state length != n_hidden + n_output");
  return decode_groups(
      std::span<const std::int8_t>(state.spins.data() + params.n_hidden,
                                   static_cast<std::size_t>(params.n_output)),
      params.n_classes, params.redundancy);
}

SpinState nudge_state(const NetworkParams& params, const InputImage& image, int y) {
  auto n = nudge_vector(params, y);
  std::vector<double> h = encode_bias(params, image);
  SpinState s = SpinState::filled(params.n_spins(), 1);
  for (int alpha = 0; alpha < params.n_output; ++alpha)
    s[params.n_hidden + alpha] = n[static_cast<std::size_t>(alpha)];
  for (int i = 0; i < params.n_hidden; ++i) {
    double field = params.b_h[i] + h[static_cast<std::size_t>(i)];
    for (int alpha = 0; alpha < params.n_output; ++alpha)
      field += params.j(i, alpha) * n[static_cast<std::size_t>(alpha)];
    s[i] = field >= 0.0 ? std::int8_t{-1} : std::int8_t{1};  // -sign(field), sign(0) -> +1
  }
  return s;
}

std::vector<SpinState> wrong_basin_references(const NetworkParams& params, const InputImage& image,
                                              int y) {
  if (y < 0 || y >= params.n_classes) throw ContractError("class index out of range");
  std::vector<SpinState> refs;
  refs.reserve(static_cast<std::size_t>(params.n_classes - 1));
  for (int c = 0; c < params.n_classes; ++c)
    if (c != y) refs.push_back(nudge_state(params, image, c));
  return refs;
}

int infer(const NetworkParams& params, const InputImage& image, const AnnealConfig& sampler) {
  IsingProblem problem = build_system_hamiltonian(params, image);
  AnnealResult r = forward_anneal(problem, sampler);
  return decode(r.state, params);
}

}  // namespace spinnet
