#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spinnet/deep.hpp"

using namespace spinnet;
using namespace spinnet::test;

TEST_SUITE_BEGIN("deep");

namespace {

Dataset separable_two_class(int n_pixels, int per_class, std::uint64_t seed) {
  // two orthogonal prototypes, no noise: linearly separable by construction
  Dataset ds;
  ds.n_classes = 2;
  ds.n_pixels = n_pixels;
  Rng rng(seed);
  std::vector<double> proto0(static_cast<std::size_t>(n_pixels), 0.0);
  std::vector<double> proto1(static_cast<std::size_t>(n_pixels), 0.0);
  for (int k = 0; k < n_pixels; ++k) (k < n_pixels / 2 ? proto0 : proto1)[static_cast<std::size_t>(k)] = 1.0;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < per_class; ++k) {
      InputImage img;
      img.label = c;
      img.pixels = c == 0 ? proto0 : proto1;
      // small jitter keeps images distinct without moving them across classes
      for (auto& x : img.pixels) x = std::min(1.0, std::max(0.0, x + rng.uniform(-0.05, 0.05)));
      ds.images.push_back(std::move(img));
    }
  }
  ds.provenance_hash = "separable";
  return ds;
}

}  // namespace

TEST_CASE("deep params validation and layout") {
  DeepNetworkParams p = init_deep_params(6, {4, 4, 8}, 2, 4, 3);
  CHECK(p.n_spins() == 16);
  CHECK(p.layer_offset(0) == 0);
  CHECK(p.layer_offset(1) == 4);
  CHECK(p.layer_offset(2) == 8);
  p.validate();

  CHECK_THROWS_AS(init_deep_params(6, {4}, 2, 4, 3), ContractError);
  CHECK_THROWS_AS(init_deep_params(6, {4, 6}, 2, 4, 3), ContractError);  // output != classes*red
}

TEST_CASE("deep Hamiltonian couples only adjacent layers") {
  DeepNetworkParams p = init_deep_params(4, {3, 3, 4}, 2, 2, 5);
  InputImage img;
  img.pixels = {0.2, 0.8, 0.5, 0.1};
  IsingProblem h = build_deep_hamiltonian(p, img);
  REQUIRE(h.layers().size() == 3);
  for (const auto& c : h.couplings()) {
    int li = -1, lj = -1;
    for (int l = 0; l < 3; ++l) {
      if (c.i >= h.layers()[l].begin && c.i < h.layers()[l].end) li = l;
      if (c.j >= h.layers()[l].begin && c.j < h.layers()[l].end) lj = l;
    }
    CHECK(lj == li + 1);
  }
}

TEST_CASE("deep Hamiltonian energy matches a direct recomputation") {
  Rng rng(6);
  DeepNetworkParams p = init_deep_params(5, {3, 3, 4}, 2, 2, 7);
  InputImage img = random_image(rng, 5);
  IsingProblem h = build_deep_hamiltonian(p, img);
  for (int t = 0; t < 50; ++t) {
    SpinState s = random_state(rng, p.n_spins());
    double expect = 0.0;
    for (int l = 0; l + 1 < 3; ++l) {
      const int na = p.layer_sizes[static_cast<std::size_t>(l)];
      const int nb = p.layer_sizes[static_cast<std::size_t>(l) + 1];
      for (int i = 0; i < na; ++i)
        for (int k = 0; k < nb; ++k)
          expect += p.J[static_cast<std::size_t>(l)][static_cast<std::size_t>(i) * nb + k] *
                    s[p.layer_offset(l) + i] * s[p.layer_offset(l + 1) + k];
    }
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < p.layer_sizes[static_cast<std::size_t>(l)]; ++i)
        expect += p.b[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] * s[p.layer_offset(l) + i];
    for (int i = 0; i < p.layer_sizes[0]; ++i) {
      double h_i = 0.0;
      for (int a = 0; a < 5; ++a) h_i += p.W[static_cast<std::size_t>(i) * 5 + a] * img.pixels[static_cast<std::size_t>(a)];
      expect += h_i * s[i];
    }
    CHECK(h.energy(s) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("frozen layers stay frozen through a pass") {
  // check_frozen_unchanged throws on violation; a full pass must run clean
  Rng rng(7);
  DeepNetworkParams p = init_deep_params(4, {3, 3, 4}, 2, 2, 11);
  InputImage img = random_image(rng, 4, 1);
  DeepPassOptions opt;
  opt.m = 3;
  opt.sampler = fast_config();
  opt.sampler.sweeps = 60;
  opt.seed = 5;
  CHECK_NOTHROW(deep_sweep_pass(p, img, 1, opt));
}

TEST_CASE("L=2 backward pair update equals the three-layer dragon update") {
  Rng rng(8);
  // L=2 deep net == the standard three-layer network (hidden + output)
  DeepNetworkParams dp = init_deep_params(5, {4, 4}, 2, 2, 13);
  NetworkParams np = zero_params(5, 4, 2, 2);
  np.W = dp.W;
  np.J = dp.J[0];
  np.b_h = dp.b[0];
  np.b_o = dp.b[1];

  InputImage img = random_image(rng, 5, 0);
  DeepPassOptions opt;
  opt.m = 4;
  opt.sampler = fast_config();
  opt.sampler.sweeps = 80;
  opt.seed = 9;
  opt.nudge_strength = 8.0;  // strong nudge pins the output layer
  DeepPassResult res = deep_sweep_pass(dp, img, 0, opt);

  // reconstruct the same batch the backward pair sampled
  SpinState sigma = greedy_deep_state(dp, img);
  IsingProblem fwd = build_deep_hamiltonian(dp, img, {0, 1}, sigma);
  AnnealConfig cfg = opt.sampler;
  cfg.rng_seed = derive_seed(opt.seed, 0);
  sigma = forward_anneal(fwd, cfg).state;

  IsingProblem free_prob = build_deep_hamiltonian(dp, img, {0, 1}, sigma);
  AnnealConfig bcfg = opt.sampler;
  bcfg.rng_seed = derive_seed(opt.seed, 1);
  SampleBatch batch = sample_batch(free_prob, {}, opt.m, bcfg, opt.parallel);

  SpinState sigma_n = sigma;
  for (int a = 0; a < 4; ++a) sigma_n[4 + a] = (a / 2 == 0) ? 1 : -1;
  IsingProblem nudge_prob = build_deep_hamiltonian(dp, img, {0, 1}, sigma_n, 0, 8.0);
  AnnealConfig ncfg = opt.sampler;
  ncfg.rng_seed = derive_seed(opt.seed, 2);
  SpinState nudge = forward_anneal(nudge_prob, ncfg).state;

  NetworkParams expect = dragon_update(np, img, 0, batch, nudge, opt.rates);
  CHECK(res.params.J[0] == expect.J);
  CHECK(res.params.b[0] == expect.b_h);
  CHECK(res.params.b[1] == expect.b_o);
  CHECK(res.params.W == expect.W);
}

TEST_CASE("4-layer toy reaches zero training error on a separable task") {
  Dataset ds = separable_two_class(6, 4, 31);
  DeepNetworkParams p = init_deep_params(6, {4, 4, 4, 8}, 2, 4, 17);
  DeepPassOptions opt;
  opt.m = 4;
  opt.rates = LearningRates{0.05, 0.05, 0.01, 0.01};
  opt.sampler = fast_config();
  opt.sampler.sweeps = 100;
  opt.seed = 23;
  opt.nudge_strength = 2.0;

  auto records = deep_train(p, ds, 200, opt);
  REQUIRE(!records.empty());
  CHECK(records.back().train_error == 0.0);
  CHECK(records.back().pass <= 200);
}

TEST_SUITE_END();
