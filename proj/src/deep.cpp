#include "spinnet/deep.hpp"

#include <algorithm>
#include <cmath>

#include "spinnet/rng.hpp"

namespace spinnet {

int DeepNetworkParams::n_spins() const {
  int n = 0;
  for (int s : layer_sizes) n += s;
  return n;
}

int DeepNetworkParams::layer_offset(int l) const {
  int off = 0;
  for (int k = 0; k < l; ++k) off += layer_sizes[static_cast<std::size_t>(k)];
  return off;
}

void DeepNetworkParams::validate() const {
  if (n_layers() < 2) throw ContractError("deep network needs at least 2 layers");
  if (n_input < 1 || n_classes < 1 || redundancy < 1)
    throw ContractError("deep network dimensions must be positive");
  if (layer_sizes.back() != n_classes * redundancy)
    throw ContractError("output layer size must equal n_classes * redundancy");
  for (int s : layer_sizes)
    if (s < 1) throw ContractError("empty layer");
  if (static_cast<int>(W.size()) != layer_sizes[0] * n_input)
    throw DimensionError("W shape mismatch");
  if (static_cast<int>(J.size()) != n_layers() - 1 || static_cast<int>(b.size()) != n_layers())
    throw DimensionError("per-layer tensor count mismatch");
  for (int l = 0; l + 1 < n_layers(); ++l)
    if (static_cast<int>(J[static_cast<std::size_t>(l)].size()) !=
        layer_sizes[static_cast<std::size_t>(l)] * layer_sizes[static_cast<std::size_t>(l) + 1])
      throw DimensionError("J shape mismatch at layer " + std::to_string(l));
  for (int l = 0; l < n_layers(); ++l)
    if (static_cast<int>(b[static_cast<std::size_t>(l)].size()) !=
        layer_sizes[static_cast<std::size_t>(l)])
      throw DimensionError("b shape mismatch at layer " + std::to_string(l));
}

DeepNetworkParams init_deep_params(int n_input, std::vector<int> layer_sizes, int n_classes,
                                   int redundancy, std::uint64_t seed) {
  DeepNetworkParams p;
  p.n_input = n_input;
  p.layer_sizes = std::move(layer_sizes);
  p.n_classes = n_classes;
  p.redundancy = redundancy;
  Rng rng(seed);
  p.W.resize(static_cast<std::size_t>(p.layer_sizes[0]) * n_input);
  const double w_range = 1.0 / std::sqrt(static_cast<double>(n_input));
  for (auto& v : p.W) v = rng.uniform(-w_range, w_range);
  for (int l = 0; l + 1 < p.n_layers(); ++l) {
    std::vector<double> j(static_cast<std::size_t>(p.layer_sizes[static_cast<std::size_t>(l)]) *
                          p.layer_sizes[static_cast<std::size_t>(l) + 1]);
    const double j_range = 1.0 / std::sqrt(static_cast<double>(p.layer_sizes[static_cast<std::size_t>(l)]));
    for (auto& v : j) v = rng.uniform(-j_range, j_range);
    p.J.push_back(std::move(j));
  }
  for (int s : p.layer_sizes) p.b.emplace_back(static_cast<std::size_t>(s), 0.0);
  p.validate();
  return p;
}

namespace {

std::vector<double> input_field(const DeepNetworkParams& p, const InputImage& image) {
  if (static_cast<int>(image.pixels.size()) != p.n_input)
    throw DimensionError("pixel count does not match n_input");
  std::vector<double> h(static_cast<std::size_t>(p.layer_sizes[0]), 0.0);
  for (int i = 0; i < p.layer_sizes[0]; ++i) {
    double acc = 0.0;
    const double* row = p.W.data() + static_cast<std::size_t>(i) * p.n_input;
    for (int a = 0; a < p.n_input; ++a) acc += row[a] * image.pixels[static_cast<std::size_t>(a)];
    h[static_cast<std::size_t>(i)] = acc;
  }
  return h;
}

}  // namespace

IsingProblem build_deep_hamiltonian(const DeepNetworkParams& params, const InputImage& image,
                                    const std::vector<int>& active_layers, const SpinState& pinned,
                                    int nudge_y, double nudge_strength) {
  params.validate();
  const int L = params.n_layers();
  const int n = params.n_spins();
  std::vector<double> h = input_field(params, image);

  std::vector<Coupling> couplings;
  for (int l = 0; l + 1 < L; ++l) {
    const int off_a = params.layer_offset(l), off_b = params.layer_offset(l + 1);
    const int na = params.layer_sizes[static_cast<std::size_t>(l)];
    const int nb = params.layer_sizes[static_cast<std::size_t>(l) + 1];
    const auto& jmat = params.J[static_cast<std::size_t>(l)];
    for (int i = 0; i < na; ++i)
      for (int k = 0; k < nb; ++k)
        if (double v = jmat[static_cast<std::size_t>(i) * nb + k]; v != 0.0)
          couplings.push_back({off_a + i, off_b + k, v});
  }

  std::vector<double> bias(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < L; ++l) {
    const int off = params.layer_offset(l);
    for (int i = 0; i < params.layer_sizes[static_cast<std::size_t>(l)]; ++i)
      bias[static_cast<std::size_t>(off + i)] = params.b[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < params.layer_sizes[0]; ++i) bias[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)];
  if (nudge_y >= 0) {
    if (nudge_y >= params.n_classes) throw ContractError("class index out of range");
    const int off = params.layer_offset(L - 1);
    for (int a = 0; a < params.layer_sizes.back(); ++a) {
      int na = (a / params.redundancy == nudge_y) ? 1 : -1;
      bias[static_cast<std::size_t>(off + a)] -= nudge_strength * na;
    }
  }

  std::vector<std::int8_t> frozen;
  if (!active_layers.empty()) {
    if (pinned.size() != n) throw DimensionError("pinned state length mismatch");
    frozen.assign(static_cast<std::size_t>(n), 0);
    for (int l = 0; l < L; ++l) {
      if (std::find(active_layers.begin(), active_layers.end(), l) != active_layers.end()) continue;
      const int off = params.layer_offset(l);
      for (int i = 0; i < params.layer_sizes[static_cast<std::size_t>(l)]; ++i)
        frozen[static_cast<std::size_t>(off + i)] = pinned[off + i];
    }
  }

  std::vector<LayerSpan> spans;
  for (int l = 0; l < L; ++l)
    spans.push_back({params.layer_offset(l),
                     params.layer_offset(l) + params.layer_sizes[static_cast<std::size_t>(l)]});
  return IsingProblem(n, std::move(couplings), std::move(bias), std::move(frozen),
                      std::move(spans));
}

SpinState greedy_deep_state(const DeepNetworkParams& params, const InputImage& image) {
  params.validate();
  std::vector<double> h = input_field(params, image);
  SpinState s = SpinState::filled(params.n_spins(), -1);
  for (int l = 0; l < params.n_layers(); ++l) {
    const int off = params.layer_offset(l);
    const int nl = params.layer_sizes[static_cast<std::size_t>(l)];
    for (int i = 0; i < nl; ++i) {
      double field = params.b[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
      if (l == 0) field += h[static_cast<std::size_t>(i)];
      if (l > 0) {
        const int np = params.layer_sizes[static_cast<std::size_t>(l) - 1];
        const int off_p = params.layer_offset(l - 1);
        const auto& jmat = params.J[static_cast<std::size_t>(l) - 1];
        for (int k = 0; k < np; ++k)
          field += jmat[static_cast<std::size_t>(k) * nl + i] * s[off_p + k];
      }
      s[off + i] = field >= 0.0 ? std::int8_t{-1} : std::int8_t{1};
    }
  }
  return s;
}

int deep_decode(const SpinState& state, const DeepNetworkParams& params) {
  if (state.size() != params.n_spins()) throw DimensionError("state length mismatch");
  const int off = params.layer_offset(params.n_layers() - 1);
  return decode_groups(std::span<const std::int8_t>(state.spins.data() + off,
                                                    static_cast<std::size_t>(params.layer_sizes.back())),
                       params.n_classes, params.redundancy);
}

namespace {

void check_frozen_unchanged(const IsingProblem& problem, const SpinState& before,
                            const SpinState& after) {
  for (int i = 0; i < problem.n_spins(); ++i)
    if (problem.frozen()[i] != 0 && before[i] != after[i])
      throw ContractError("frozen spin moved during a partial anneal");
}

}  // namespace

DeepPassResult deep_sweep_pass(const DeepNetworkParams& params, const InputImage& image, int y,
                               const DeepPassOptions& options) {
  params.validate();
  const int L = params.n_layers();
  if (L < 2) throw ContractError("deep sweep needs at least 2 layers");
  if (y < 0 || y >= params.n_classes) throw ContractError("class index out of range");
  options.rates.validate();

  DeepPassResult res;
  res.params = params;

  // forward sweep: free relaxation, two active layers at a time
  SpinState sigma = greedy_deep_state(params, image);
  std::uint64_t stream = 0;
  for (int l = 0; l + 1 < L; ++l) {
    IsingProblem prob = build_deep_hamiltonian(params, image, {l, l + 1}, sigma);
    AnnealConfig cfg = options.sampler;
    cfg.rng_seed = derive_seed(options.seed, stream++);
    AnnealResult r = forward_anneal(prob, cfg);
    check_frozen_unchanged(prob, sigma, r.state);
    sigma = r.state;
  }
  res.free_config = sigma;
  res.predicted = deep_decode(sigma, params);

  // nudge configuration: output layer pinned to the class pattern
  SpinState sigma_n = sigma;
  {
    const int off = params.layer_offset(L - 1);
    for (int a = 0; a < params.layer_sizes.back(); ++a)
      sigma_n[off + a] = (a / params.redundancy == y) ? std::int8_t{1} : std::int8_t{-1};
  }

  // backward sweep: sample m free states and one nudge state per pair,
  // update that pair's parameters with the averaged difference
  for (int l = L - 2; l >= 0; --l) {
    IsingProblem free_prob = build_deep_hamiltonian(res.params, image, {l, l + 1}, sigma);
    AnnealConfig cfg = options.sampler;
    cfg.rng_seed = derive_seed(options.seed, stream++);
    SampleBatch batch = sample_batch(free_prob, {}, options.m, cfg, options.parallel);
    for (const auto& st : batch.states) check_frozen_unchanged(free_prob, sigma, st);

    IsingProblem nudge_prob = build_deep_hamiltonian(res.params, image, {l, l + 1}, sigma_n, y,
                                                     options.nudge_strength);
    AnnealConfig ncfg = options.sampler;
    ncfg.rng_seed = derive_seed(options.seed, stream++);
    AnnealResult nudge = forward_anneal(nudge_prob, ncfg);
    check_frozen_unchanged(nudge_prob, sigma_n, nudge.state);
    sigma_n = nudge.state;

    const int off_a = res.params.layer_offset(l), off_b = res.params.layer_offset(l + 1);
    const int na = res.params.layer_sizes[static_cast<std::size_t>(l)];
    const int nb = res.params.layer_sizes[static_cast<std::size_t>(l) + 1];
    const int m = batch.size();

    std::vector<double> mean_a(static_cast<std::size_t>(na), 0.0);
    std::vector<double> mean_b(static_cast<std::size_t>(nb), 0.0);
    std::vector<double> corr(static_cast<std::size_t>(na) * nb, 0.0);
    for (const auto& st : batch.states) {
      for (int i = 0; i < na; ++i) mean_a[static_cast<std::size_t>(i)] += st[off_a + i];
      for (int k = 0; k < nb; ++k) mean_b[static_cast<std::size_t>(k)] += st[off_b + k];
      for (int i = 0; i < na; ++i)
        for (int k = 0; k < nb; ++k)
          corr[static_cast<std::size_t>(i) * nb + k] +=
              static_cast<double>(st[off_a + i]) * st[off_b + k];
    }
    const double inv_m = 1.0 / m;
    for (auto& v : mean_a) v *= inv_m;
    for (auto& v : mean_b) v *= inv_m;
    for (auto& v : corr) v *= inv_m;

    auto& jmat = res.params.J[static_cast<std::size_t>(l)];
    for (int i = 0; i < na; ++i) {
      const double ni = sigma_n[off_a + i];
      for (int k = 0; k < nb; ++k)
        jmat[static_cast<std::size_t>(i) * nb + k] +=
            options.rates.j *
            (corr[static_cast<std::size_t>(i) * nb + k] - ni * sigma_n[off_b + k]);
    }
    const double rate_b = (l + 1 == L - 1) ? options.rates.o : options.rates.h;
    for (int k = 0; k < nb; ++k)
      res.params.b[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(k)] +=
          rate_b * (mean_b[static_cast<std::size_t>(k)] - sigma_n[off_b + k]);
    for (int i = 0; i < na; ++i)
      res.params.b[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] +=
          options.rates.h * (mean_a[static_cast<std::size_t>(i)] - sigma_n[off_a + i]);
    if (l == 0) {
      for (int i = 0; i < na; ++i) {
        const double dh = mean_a[static_cast<std::size_t>(i)] - sigma_n[off_a + i];
        if (dh != 0.0) {
          const double scale = options.rates.w * dh;
          double* row = res.params.W.data() + static_cast<std::size_t>(i) * res.params.n_input;
          for (int a = 0; a < res.params.n_input; ++a)
            row[a] += scale * image.pixels[static_cast<std::size_t>(a)];
        }
      }
    }
  }

  return res;
}

int deep_infer(const DeepNetworkParams& params, const InputImage& image,
               const DeepPassOptions& options) {
  SpinState sigma = greedy_deep_state(params, image);
  std::uint64_t stream = 0x1f0000ULL;
  for (int l = 0; l + 1 < params.n_layers(); ++l) {
    IsingProblem prob = build_deep_hamiltonian(params, image, {l, l + 1}, sigma);
    AnnealConfig cfg = options.sampler;
    cfg.rng_seed = derive_seed(options.seed, stream++);
    sigma = forward_anneal(prob, cfg).state;
  }
  return deep_decode(sigma, params);
}

namespace {

double deep_eval(const DeepNetworkParams& params, const Dataset& ds,
                 const DeepPassOptions& options, std::uint64_t stream) {
  int errors = 0;
  for (int k = 0; k < ds.size(); ++k) {
    DeepPassOptions eval_opts = options;
    eval_opts.seed = derive_seed(options.seed, stream + static_cast<std::uint64_t>(k));
    if (deep_infer(params, ds.images[static_cast<std::size_t>(k)], eval_opts) !=
        ds.images[static_cast<std::size_t>(k)].label)
      ++errors;
  }
  return static_cast<double>(errors) / ds.size();
}

}  // namespace

std::vector<DeepTrainRecord> deep_train(DeepNetworkParams& params, const Dataset& dataset,
                                        int n_passes, const DeepPassOptions& options,
                                        const Dataset* test_set) {
  if (dataset.size() < 1) throw ContractError("empty training dataset");
  std::vector<int> order(static_cast<std::size_t>(dataset.size()));
  for (int k = 0; k < dataset.size(); ++k) order[static_cast<std::size_t>(k)] = k;
  Rng shuffle_rng(derive_seed(options.seed, 0xDEE9ULL));
  shuffle_rng.shuffle(order);

  std::vector<DeepTrainRecord> records;
  for (int pass = 1; pass <= n_passes; ++pass) {
    std::size_t pos = static_cast<std::size_t>((pass - 1) % dataset.size());
    if (pos == 0 && pass > 1) shuffle_rng.shuffle(order);
    const InputImage& img = dataset.images[static_cast<std::size_t>(order[pos])];
    if (img.label < 0) throw ContractError("unlabeled image in training set");

    DeepPassOptions pass_opts = options;
    pass_opts.seed = derive_seed(options.seed, static_cast<std::uint64_t>(pass));
    DeepPassResult r = deep_sweep_pass(params, img, img.label, pass_opts);
    params = std::move(r.params);

    DeepTrainRecord rec;
    rec.pass = pass;
    rec.train_error =
        deep_eval(params, dataset, options, 0xE7A1ULL + static_cast<std::uint64_t>(pass) * 100000);
    rec.test_error =
        test_set && test_set->size() > 0
            ? deep_eval(params, *test_set, options,
                        0x7E57ULL + static_cast<std::uint64_t>(pass) * 100000)
            : 0.0;
    records.push_back(rec);
    if (rec.train_error == 0.0) break;
  }
  return records;
}

}  // namespace spinnet
