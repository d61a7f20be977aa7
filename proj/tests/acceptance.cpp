// Acceptance suite: one numbered criterion per invocation, or "all".
// Prints one PASS/FAIL/SKIP line per criterion; exit 0 / 1 / 77.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spinnet/analysis.hpp"
#include "spinnet/backprop.hpp"
#include "spinnet/checkpoint.hpp"
#include "spinnet/cli.hpp"
#include "spinnet/coherent.hpp"
#include "spinnet/config.hpp"
#include "spinnet/dataset.hpp"
#include "spinnet/deep.hpp"
#include "spinnet/runio.hpp"
#include "spinnet/trainer.hpp"

#ifndef SPINNET_SOURCE_DIR
#define SPINNET_SOURCE_DIR "."
#endif

using namespace spinnet;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = 0;  // 0 pass, 1 fail, 77 skip
  std::string detail;
};

Outcome pass(std::string detail) { return {0, std::move(detail)}; }
Outcome fail(std::string detail) { return {1, std::move(detail)}; }
Outcome skip(std::string detail) { return {77, std::move(detail)}; }

// ---- shared fixtures -------------------------------------------------------

IsingProblem random_toy_network_problem(Rng& rng, NetworkParams* params_out = nullptr) {
  const int n_hidden = 4 + static_cast<int>(rng.below(9));  // 4..12
  const int n_classes = 2 + static_cast<int>(rng.below(2)); // 2..3 -> 8 or 12 outputs
  NetworkParams params = init_params(8, n_hidden, n_classes, 4, rng.next());
  InputImage img;
  img.pixels.resize(8);
  for (auto& x : img.pixels) x = rng.uniform();
  if (params_out) *params_out = params;
  return build_system_hamiltonian(params, img);
}

// the synthetic ten-class task used by criteria 3 and 4
Dataset synthetic_pool() {
  SyntheticSpec spec;
  spec.n_classes = 10;
  spec.side = 8;
  spec.pool_per_class = 60;
  spec.noise = 0.15;
  spec.seed = 2024;
  return synthetic_dataset(spec);
}

TrainOptions synthetic_options(TrainMethod method, int m, std::uint64_t seed) {
  TrainOptions opt;
  opt.method = method;
  opt.m = m;
  opt.rates = LearningRates{0.01, 0.01, 0.002, 0.002};
  opt.sampler.beta_schedule = geometric_schedule(0.1, 10.0, 30);
  opt.sampler.sweeps = 300;
  opt.sampler.restarts = 1;
  opt.seed = seed;
  return opt;
}

NetworkParams synthetic_net(const Dataset& train, std::uint64_t seed) {
  return init_params(train.n_pixels, 16, train.n_classes, 4, derive_seed(seed, 0x1217ULL));
}

// ---- criteria --------------------------------------------------------------

Outcome criterion_1() {
  // sampler vs exact enumeration on random toy networks
  int hits = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(0xACC1, static_cast<std::uint64_t>(t)));
    IsingProblem problem = random_toy_network_problem(rng);
    auto [gs, ge] = brute_force_ground_state(problem);
    AnnealResult r = forward_anneal(problem, thorough_config(rng.next()));
    if (std::abs(r.energy - ge) <= 1e-9 * std::max(1.0, std::abs(ge))) ++hits;
  }
  if (hits < 95) return fail("anneal reached the ground state only " + std::to_string(hits) + "/100 times");

  // energy vs the naive double-loop oracle
  for (int t = 0; t < 1000; ++t) {
    Rng rng(derive_seed(0xACC2, static_cast<std::uint64_t>(t)));
    const int n = 6 + static_cast<int>(rng.below(10));
    std::vector<Coupling> couplings;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) couplings.push_back({i, j, rng.uniform(-1, 1)});
    std::vector<double> bias(static_cast<std::size_t>(n));
    for (auto& b : bias) b = rng.uniform(-1, 1);
    IsingProblem p(n, couplings, bias);
    SpinState s = SpinState::filled(n, 1);
    for (int i = 0; i < n; ++i) s[i] = rng.coin() ? 1 : -1;

    std::vector<std::vector<double>> dense(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (const auto& c : p.couplings()) dense[static_cast<std::size_t>(c.i)][static_cast<std::size_t>(c.j)] = c.value;
    double expect = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) expect += dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * s[i] * s[j];
    for (int i = 0; i < n; ++i) expect += bias[static_cast<std::size_t>(i)] * s[i];

    double got = p.energy(s);
    if (std::abs(got - expect) > 1e-10 * std::max(1.0, std::abs(expect)))
      return fail("energy mismatch vs the double-loop oracle at trial " + std::to_string(t));
  }
  return pass("anneal hit the exact ground state " + std::to_string(hits) +
              "/100; 1000 energies matched the naive oracle");
}

Outcome criterion_2() {
  for (int t = 0; t < 1000; ++t) {
    Rng rng(derive_seed(0xACC3, static_cast<std::uint64_t>(t)));
    const int n_hidden = 2 + static_cast<int>(rng.below(5));
    const int n_classes = 2 + static_cast<int>(rng.below(3));
    const int redundancy = 1 + static_cast<int>(rng.below(3));
    NetworkParams p = init_params(5, n_hidden, n_classes, redundancy, rng.next());
    InputImage img;
    img.pixels.resize(5);
    for (auto& x : img.pixels) x = rng.uniform();
    img.label = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));

    auto random_state = [&](int n) {
      SpinState s = SpinState::filled(n, 1);
      for (int i = 0; i < n; ++i) s[i] = rng.coin() ? 1 : -1;
      return s;
    };
    SpinState nudge = random_state(p.n_spins());
    LearningRates rates{0.011, 0.009, 0.0031, 0.0017};

    const int m = 1 + static_cast<int>(rng.below(6));
    SampleBatch batch;
    for (int k = 0; k < m; ++k) {
      batch.states.push_back(random_state(p.n_spins()));
      batch.energies.push_back(0.0);
      batch.origins.push_back("x");
    }

    // naive elementwise recomputation
    NetworkParams expect = p;
    for (int i = 0; i < p.n_hidden; ++i) {
      double mean_h = 0.0;
      for (const auto& s : batch.states) mean_h += s[i];
      mean_h /= m;
      for (int a = 0; a < p.n_input; ++a)
        expect.w(i, a) += rates.w * (mean_h - nudge[i]) * img.pixels[static_cast<std::size_t>(a)];
      expect.b_h[static_cast<std::size_t>(i)] += rates.h * (mean_h - nudge[i]);
      for (int al = 0; al < p.n_output; ++al) {
        double corr = 0.0;
        for (const auto& s : batch.states) corr += static_cast<double>(s[i]) * s[p.n_hidden + al];
        corr /= m;
        expect.j(i, al) += rates.j * (corr - nudge[i] * nudge[p.n_hidden + al]);
      }
    }
    for (int al = 0; al < p.n_output; ++al) {
      double mean_o = 0.0;
      for (const auto& s : batch.states) mean_o += s[p.n_hidden + al];
      mean_o /= m;
      expect.b_o[static_cast<std::size_t>(al)] += rates.o * (mean_o - nudge[p.n_hidden + al]);
    }

    NetworkParams got = dragon_update(p, img, img.label, batch, nudge, rates);
    auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > 1e-15) return false;
      return true;
    };
    if (!close(got.W, expect.W) || !close(got.J, expect.J) || !close(got.b_h, expect.b_h) ||
        !close(got.b_o, expect.b_o))
      return fail("dragon update disagreed with the naive oracle at trial " + std::to_string(t));

    if (m == 1) {
      NetworkParams eq = eqprop_update(p, img, img.label, batch.states[0], nudge, rates);
      if (!close(eq.W, got.W) || !close(eq.J, got.J))
        return fail("m=1 dragon differs from eqprop at trial " + std::to_string(t));
    }

    // free == nudge: exactly zero change
    NetworkParams frozen = eqprop_update(p, img, img.label, nudge, nudge, rates);
    if (frozen.W != p.W || frozen.J != p.J || frozen.b_h != p.b_h || frozen.b_o != p.b_o)
      return fail("free=nudge produced a nonzero delta at trial " + std::to_string(t));
  }
  return pass("1000 random update cases matched the naive oracle exactly");
}

Outcome criterion_3() {
  Dataset pool = synthetic_pool();
  Dataset train = make_subset(pool, 20, 7, 0);

  auto first_epoch_error = [&](TrainMethod method, int m) {
    NetworkParams params = synthetic_net(train, 5);
    TrainOptions opt = synthetic_options(method, m, 5);
    return train_epoch(params, train, opt).train_error;
  };

  double e1 = first_epoch_error(TrainMethod::eqprop, 1);
  double e10 = first_epoch_error(TrainMethod::dragon, 10);
  double e20 = first_epoch_error(TrainMethod::dragon, 20);

  std::ostringstream detail;
  detail << "first-epoch error: m=1 " << e1 << ", m=10 " << e10 << ", m=20 " << e20;
  if (!(e10 < e1)) return fail(detail.str() + " — m=10 did not beat m=1");
  if (!(std::abs(e20 - e10) < 0.5 * (e1 - e10)))
    return fail(detail.str() + " — no plateau between m=10 and m=20");
  return pass(detail.str());
}

Outcome criterion_4() {
  Dataset pool = synthetic_pool();
  Dataset train_set = make_subset(pool, 20, 7, 0);
  Dataset test_set = make_subset(pool, 10, 7, 20);
  const int epochs = 50;

  double sum_z_dragon = 0.0, sum_z_eqprop = 0.0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (TrainMethod method : {TrainMethod::dragon, TrainMethod::eqprop}) {
      const int m = method == TrainMethod::dragon ? 10 : 1;
      NetworkParams params = synthetic_net(train_set, seed);
      TrainOptions opt = synthetic_options(method, m, seed);
      TrainRun run = train(params, train_set, test_set, epochs, opt);

      std::vector<std::pair<int, double>> curve;
      for (const auto& r : run.records) curve.push_back({r.epoch, r.train_error});
      ScalingFit fit = fit_scaling(curve, 2);
      if (fit.r_squared < 0.8)
        return fail("fit r^2 " + std::to_string(fit.r_squared) + " below 0.8 for " +
                    method_name(method) + " seed " + std::to_string(seed));
      (method == TrainMethod::dragon ? sum_z_dragon : sum_z_eqprop) += fit.z;
    }
  }
  double mean_dragon = sum_z_dragon / 5, mean_eqprop = sum_z_eqprop / 5;
  detail << "mean z: dragon(m=10) " << mean_dragon << ", eqprop(m=1) " << mean_eqprop
         << " | hardware-reported reference exponents: 1.01 (dragon m=20), 0.78 (backprop),"
            " 0.64 (eqprop)";
  if (!(mean_dragon > mean_eqprop)) return fail(detail.str());
  return pass(detail.str());
}

Outcome criterion_5() {
  // quantitative digit milestone; real MNIST when provided, the bundled
  // scanned-digit export otherwise
  std::string mnist_dir = std::getenv("SPINNET_MNIST_DIR") ? std::getenv("SPINNET_MNIST_DIR") : "";
  fs::path source_dir(SPINNET_SOURCE_DIR);
  std::string img_path, lab_path, source;
  if (!mnist_dir.empty() && fs::exists(fs::path(mnist_dir) / "train-images-idx3-ubyte")) {
    img_path = (fs::path(mnist_dir) / "train-images-idx3-ubyte").string();
    lab_path = (fs::path(mnist_dir) / "train-labels-idx1-ubyte").string();
    source = "mnist";
  } else if (fs::exists(source_dir / "data/digits8/images-idx3-ubyte")) {
    img_path = (source_dir / "data/digits8/images-idx3-ubyte").string();
    lab_path = (source_dir / "data/digits8/labels-idx1-ubyte").string();
    source = "digits8";
  } else {
    return skip("no digit IDX data found (set SPINNET_MNIST_DIR or restore data/digits8)");
  }

  Dataset full = load_mnist(img_path, lab_path);
  Dataset train = make_subset(full, 100, 13, 0);
  Dataset test = make_subset(full, 10, 13, 100);

  NetworkParams params = init_params(train.n_pixels, 120, 10, 4, derive_seed(31, 0x1217ULL));
  TrainOptions opt = synthetic_options(TrainMethod::dragon, 10, 31);
  opt.rates = LearningRates{0.01, 0.01, 0.002, 0.002};

  double best_acc = 0.0;
  int best_epoch = 0;
  TrainRun run;
  run.method = "dragon";
  run.m = 10;
  run.seed = 31;
  run.dataset_hash = train.provenance_hash;
  for (int epoch = 1; epoch <= 30; ++epoch) {
    TrainOptions eo = opt;
    eo.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(epoch));
    EpochResult er = train_epoch(params, train, eo);
    params = er.params;
    double test_err = evaluate_error(params, test, opt.sampler,
                                     derive_seed(opt.seed, 0x7e57ULL + static_cast<std::uint64_t>(epoch)));
    run.records.push_back({epoch, er.train_error, test_err, 0.0});
    if (1.0 - test_err > best_acc) {
      best_acc = 1.0 - test_err;
      best_epoch = epoch;
    }
    if (best_acc >= 0.9) break;  // well past the bar; archive and stop
  }
  write_run_csv("acceptance5_curve.csv", run);

  std::ostringstream detail;
  detail << source << ": best test accuracy " << best_acc * 100 << "% at epoch " << best_epoch
         << " (curve archived to acceptance5_curve.csv)";
  if (best_acc >= 0.8) return pass(detail.str());
  return fail(detail.str() + " — below the 80% milestone (soft criterion: investigate)");
}

Outcome criterion_6() {
  std::vector<std::pair<int, double>> exact;
  for (int e = 1; e <= 60; ++e) exact.push_back({e, 0.37 * std::pow(e, -1.01)});
  ScalingFit fit = fit_scaling(exact, 2);
  if (std::abs(fit.z - 1.01) > 1e-9)
    return fail("noiseless planted z recovered as " + std::to_string(fit.z));

  Rng rng(0xACC6);
  std::vector<std::pair<int, double>> noisy;
  for (int e = 1; e <= 100; ++e) {
    double n = 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
    noisy.push_back({e, 0.8 * std::pow(e, -1.01) * n});
  }
  ScalingFit nf = fit_scaling(noisy, 2);
  if (std::abs(nf.z - 1.01) > 0.05)
    return fail("noisy planted z recovered as " + std::to_string(nf.z));
  return pass("planted exponents recovered: exact |dz| < 1e-9, 5% noise |dz| = " +
              std::to_string(std::abs(nf.z - 1.01)));
}

Outcome criterion_7() {
  NetworkParams params = init_params(4, 4, 2, 4, 0xACC7);  // 12 spins
  auto mask = target_mask(params, 0, AmplifyTarget::wrong);
  const std::size_t dim = mask.size();
  long long n_target = 0;
  for (auto b : mask) n_target += b;

  std::vector<int> queries;
  std::ostringstream detail;
  for (double p : {0.04, 0.01}) {
    QuantumState psi;
    psi.amp.assign(dim, 0.0);
    double amp_t = std::sqrt(p / static_cast<double>(n_target));
    double amp_o = std::sqrt((1.0 - p) / static_cast<double>(dim - n_target));
    for (std::size_t k = 0; k < dim; ++k) psi.amp[k] = mask[k] ? amp_t : amp_o;

    AmplifyResult res = amplitude_amplify_state(psi, mask);
    int expect_k =
        static_cast<int>(std::llround(std::numbers::pi / (4.0 * std::asin(std::sqrt(p))) - 0.5));
    if (res.k != expect_k || res.oracle_queries != 2 * expect_k + 1)
      return fail("iteration count off at p=" + std::to_string(p));
    if (res.success_prob < 0.9)
      return fail("success probability " + std::to_string(res.success_prob) + " at p=" +
                  std::to_string(p));
    queries.push_back(res.oracle_queries);
    detail << "p=" << p << ": k=" << res.k << " queries=" << res.oracle_queries
           << " success=" << res.success_prob << "; ";
  }
  double ratio = static_cast<double>(queries[1]) / queries[0];
  if (ratio < 1.3 || ratio > 3.0)
    return fail("query ratio " + std::to_string(ratio) + " outside [1.3, 3.0]");

  int direct = static_cast<int>(std::ceil(std::log(0.1) / std::log(1.0 - 0.01)));
  detail << "ratio=" << ratio << "; direct sampling at p=0.01 needs " << direct
         << " runs vs " << queries[1] << " amplified";
  if (direct < 3 * queries[1]) return fail(detail.str() + " — separation below 3x");
  return pass(detail.str());
}

Outcome criterion_8() {
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(0xACC8, static_cast<std::uint64_t>(t)));
    const int n = 6;
    const int m = 1 + static_cast<int>(rng.below(8));
    std::vector<std::uint32_t> indices;
    while (static_cast<int>(indices.size()) < m) {
      auto idx = static_cast<std::uint32_t>(rng.below(1ULL << n));
      bool dup = false;
      for (auto i : indices) dup |= i == idx;
      if (!dup) indices.push_back(idx);
    }
    QuantumState psi;
    psi.amp.assign(1ULL << n, 0.0);
    double a = 1.0 / std::sqrt(static_cast<double>(m));
    for (auto idx : indices) psi.amp[idx] = a;

    SampleBatch batch;
    for (auto idx : indices) {
      batch.states.push_back(basis_spins(n, idx));
      batch.energies.push_back(0.0);
      batch.origins.push_back("x");
    }

    FreeStats quantum = expectation_update_inputs(psi, 3, 3);
    FreeStats classical = batch_stats(batch, 3, 3);
    // exact up to double rounding: |a|^2 for non-power-of-two m rounds once
    const double tol = 8.0 * m * 2.220446049250313e-16;
    for (std::size_t k = 0; k < quantum.hidden_mean.size(); ++k)
      if (std::abs(quantum.hidden_mean[k] - classical.hidden_mean[k]) > tol)
        return fail("hidden mean mismatch at trial " + std::to_string(t));
    for (std::size_t k = 0; k < quantum.output_mean.size(); ++k)
      if (std::abs(quantum.output_mean[k] - classical.output_mean[k]) > tol)
        return fail("output mean mismatch at trial " + std::to_string(t));
    for (std::size_t k = 0; k < quantum.correlator.size(); ++k)
      if (std::abs(quantum.correlator[k] - classical.correlator[k]) > tol)
        return fail("correlator mismatch at trial " + std::to_string(t));
  }
  return pass("100 random superpositions matched the sample averages");
}

Outcome criterion_9() {
  // linearly separable two-class task, orthogonal prototypes
  Dataset ds;
  ds.n_classes = 2;
  ds.n_pixels = 6;
  Rng jitter(0xACC9);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 4; ++k) {
      InputImage img;
      img.label = c;
      img.pixels.assign(6, 0.0);
      for (int px = 0; px < 3; ++px)
        img.pixels[static_cast<std::size_t>(c * 3 + px)] = 0.9 + 0.1 * jitter.uniform();
      ds.images.push_back(std::move(img));
    }
  }
  ds.provenance_hash = "acc9";

  DeepNetworkParams params = init_deep_params(6, {4, 4, 4, 8}, 2, 4, 17);
  DeepPassOptions opt;
  opt.m = 4;
  opt.rates = LearningRates{0.05, 0.05, 0.01, 0.01};
  opt.sampler.beta_schedule = geometric_schedule(0.1, 10.0, 20);
  opt.sampler.sweeps = 100;
  opt.seed = 23;
  opt.nudge_strength = 2.0;

  // the untrained net must misclassify, otherwise nothing is demonstrated
  int initial_errors = 0;
  for (const auto& img : ds.images)
    if (deep_infer(params, img, opt) != img.label) ++initial_errors;
  if (initial_errors == 0) return fail("initial network already classifies the task");

  // deep_sweep_pass validates frozen spins after every partial anneal and
  // throws on any violation, so a clean run is itself the frozen-spin check
  auto records = deep_train(params, ds, 200, opt);
  if (records.empty()) return fail("no passes recorded");
  const auto& last = records.back();
  std::ostringstream detail;
  detail << "initial error " << static_cast<double>(initial_errors) / ds.size()
         << ", training error " << last.train_error << " after " << last.pass << " passes";
  if (last.train_error != 0.0) return fail(detail.str() + " — did not reach zero within 200");
  return pass(detail.str());
}

Outcome criterion_10() {
  // gradient check on the 5-3-2 architecture
  Rng rng(0xACCA);
  NetworkParams p = init_params(5, 3, 2, 1, 7);
  for (auto& v : p.b_h) v = rng.uniform(-0.1, 0.1);
  for (auto& v : p.b_o) v = rng.uniform(-0.1, 0.1);
  std::vector<InputImage> images;
  for (int k = 0; k < 6; ++k) {
    InputImage img;
    img.label = k % 2;
    img.pixels.resize(5);
    for (auto& x : img.pixels) x = rng.uniform();
    images.push_back(std::move(img));
  }
  std::vector<const InputImage*> batch;
  for (const auto& img : images) batch.push_back(&img);

  MlpGradients g = mlp_gradient(p, batch);
  const double eps = 1e-6;
  auto check_tensor = [&](std::vector<double>& tensor, const std::vector<double>& grad,
                          const char* name) -> std::string {
    for (std::size_t k = 0; k < tensor.size(); ++k) {
      double saved = tensor[k];
      tensor[k] = saved + eps;
      double up = mlp_loss(p, batch);
      tensor[k] = saved - eps;
      double down = mlp_loss(p, batch);
      tensor[k] = saved;
      double fd = (up - down) / (2 * eps);
      if (std::abs(grad[k] - fd) > 1e-5 * std::max(1.0, std::abs(fd)))
        return std::string(name) + "[" + std::to_string(k) + "] analytic " +
               std::to_string(grad[k]) + " vs fd " + std::to_string(fd);
    }
    return "";
  };
  for (auto [tensor, grad, name] :
       {std::tuple<std::vector<double>*, const std::vector<double>*, const char*>{&p.W, &g.W, "W"},
        {&p.J, &g.J, "J"},
        {&p.b_h, &g.b_h, "b_h"},
        {&p.b_o, &g.b_o, "b_o"}}) {
    std::string err = check_tensor(*tensor, *grad, name);
    if (!err.empty()) return fail("gradient mismatch: " + err);
  }

  // the baseline's CSV feeds compare_runs like any sampler run
  SyntheticSpec spec;
  spec.n_classes = 3;
  spec.side = 4;
  spec.pool_per_class = 20;
  Dataset pool = synthetic_dataset(spec);
  Dataset train_set = make_subset(pool, 12, 3, 0);
  Dataset test_set = make_subset(pool, 4, 3, 12);
  NetworkParams bp = init_params(train_set.n_pixels, 8, 3, 2, 5);
  BackpropHyper hyper;
  TrainRun bp_run = backprop_train(bp, train_set, test_set, 40, hyper, 5);

  NetworkParams ip = init_params(train_set.n_pixels, 8, 3, 2, 5);
  TrainOptions opt = synthetic_options(TrainMethod::eqprop, 1, 5);
  opt.sampler.sweeps = 100;
  TrainRun eq_run = train(ip, train_set, test_set, 40, opt);
  try {
    CompareReport rep = compare_runs({bp_run, eq_run});
    if (rep.methods.size() != 2) return fail("compare report malformed");
  } catch (const InsufficientDataError& e) {
    return fail(std::string("compare_runs rejected the baseline CSV: ") + e.what());
  }
  return pass("5-3-2 gradients match finite differences; baseline CSV feeds compare_runs");
}

Outcome criterion_11() {
  fs::path dir = fs::temp_directory_path() / "spinnet-acceptance11";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "golden.cfg").string();
  {
    std::ofstream f(cfg_path);
    f << "# golden toy configuration\n"
         "method = dragon\n"
         "m = 5\n"
         "epochs = 4\n"
         "seed = 11\n"
         "dataset = synthetic\n"
         "synthetic.classes = 4\n"
         "synthetic.side = 5\n"
         "synthetic.pool_per_class = 15\n"
         "synthetic.noise = 0.08\n"
         "subset.train_per_class = 10\n"
         "subset.test_per_class = 4\n"
         "net.hidden = 8\n"
         "net.redundancy = 3\n"
         "sampler.sweeps = 120\n"
         "sampler.beta_steps = 15\n";
  }

  auto read_file = [](const fs::path& p) {
    std::ifstream f(p);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };

  if (cli_dispatch({"train", "--config", cfg_path, "--out", (dir / "a").string()}) != 0)
    return fail("first training run failed");
  if (cli_dispatch({"train", "--config", cfg_path, "--out", (dir / "b").string()}) != 0)
    return fail("second training run failed");
  std::string a = read_file(dir / "a" / "run.csv");
  std::string b = read_file(dir / "b" / "run.csv");
  if (a != b) return fail("two runs of the golden config differ");

#ifdef _OPENMP
  // different worker counts must not change a byte
  ::setenv("OMP_NUM_THREADS", "1", 1);
  if (cli_dispatch({"train", "--config", cfg_path, "--out", (dir / "c").string()}) != 0)
    return fail("single-thread run failed");
  ::unsetenv("OMP_NUM_THREADS");
  std::string c = read_file(dir / "c" / "run.csv");
  if (a != c) return fail("worker count changed the CSV bytes");
#endif

  std::string ck_a = read_file(dir / "a" / "checkpoint.txt");
  std::string ck_b = read_file(dir / "b" / "checkpoint.txt");
  if (ck_a != ck_b) return fail("checkpoints differ between identical runs");
  return pass("byte-identical CSVs and checkpoints across runs and worker counts");
}

}  // namespace

int main(int argc, char** argv) {
  using Criterion = Outcome (*)();
  static const Criterion criteria[11] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                         criterion_5, criterion_6, criterion_7, criterion_8,
                                         criterion_9, criterion_10, criterion_11};

  std::vector<int> to_run;
  if (argc < 2 || std::string(argv[1]) == "all") {
    for (int k = 1; k <= 11; ++k) to_run.push_back(k);
  } else {
    to_run.push_back(std::atoi(argv[1]));
  }

  int exit_code = 0;
  for (int k : to_run) {
    if (k < 1 || k > 11) {
      std::fprintf(stderr, "error: criterion number must be 1..11\n");
      return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k - 1]();
    } catch (const std::exception& e) {
      out = fail(std::string("unhandled exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = out.status == 0 ? "PASS" : out.status == 77 ? "SKIP" : "FAIL";
    std::printf("criterion %d: %s (%.1fs) — %s\n", k, tag, secs, out.detail.c_str());
    std::fflush(stdout);
    if (out.status == 1) exit_code = 1;
    if (out.status == 77 && exit_code == 0 && to_run.size() == 1) exit_code = 77;
  }
  return exit_code;
}
