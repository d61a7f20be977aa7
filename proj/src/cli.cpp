#include "spinnet/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unistd.h>

#include <CLI11.hpp>

#include "spinnet/analysis.hpp"
#include "spinnet/backprop.hpp"
#include "spinnet/checkpoint.hpp"
#include "spinnet/coherent.hpp"
#include "spinnet/config.hpp"
#include "spinnet/dataset.hpp"
#include "spinnet/deep.hpp"
#include "spinnet/runio.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

namespace {

namespace fs = std::filesystem;

// Exclusive marker so concurrent runs cannot share an output directory.
class LockFile {
 public:
  explicit LockFile(const fs::path& dir) {
    fs::create_directories(dir);
    path_ = dir / ".spinnet.lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0)
      throw ConfigError("output directory is locked by another run: " + path_.string());
  }
  ~LockFile() {
    if (fd_ >= 0) {
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

AnnealConfig sampler_from_config(const RunConfig& cfg) {
  AnnealConfig c;
  c.beta_schedule = geometric_schedule(cfg.get_double("sampler.beta0", 0.1),
                                       cfg.get_double("sampler.beta1", 10.0),
                                       static_cast<int>(cfg.get_int("sampler.beta_steps", 30)));
  c.sweeps = static_cast<int>(cfg.get_int("sampler.sweeps", 300));
  c.restarts = static_cast<int>(cfg.get_int("sampler.restarts", 1));
  c.cycle_depth = cfg.get_double("sampler.cycle_depth", 0.3);
  c.n_cycles = static_cast<int>(cfg.get_int("sampler.n_cycles", 5));
  return c;
}

struct LoadedData {
  Dataset train;
  Dataset test;
};

LoadedData datasets_from_config(const RunConfig& cfg) {
  LoadedData d;
  const std::string kind = cfg.get_string("dataset", "synthetic");
  const int train_pc = static_cast<int>(cfg.get_int("subset.train_per_class", 30));
  const int test_pc = static_cast<int>(cfg.get_int("subset.test_per_class", 10));
  const std::uint64_t subset_seed = cfg.get_u64("subset.seed", 7);

  if (kind == "synthetic") {
    SyntheticSpec spec;
    spec.n_classes = static_cast<int>(cfg.get_int("synthetic.classes", 10));
    spec.side = static_cast<int>(cfg.get_int("synthetic.side", 8));
    spec.pool_per_class = static_cast<int>(cfg.get_int("synthetic.pool_per_class", 200));
    spec.noise = cfg.get_double("synthetic.noise", 0.1);
    spec.seed = cfg.get_u64("synthetic.seed", 1);
    Dataset pool = synthetic_dataset(spec);
    d.train = make_subset(pool, train_pc, subset_seed, 0);
    d.test = make_subset(pool, test_pc, subset_seed, train_pc);
  } else if (kind == "idx") {
    const std::string train_imgs = cfg.get_string("idx.train_images", "");
    const std::string test_imgs = cfg.get_string("idx.test_images", "");
    Dataset full_train = load_mnist(train_imgs, cfg.get_string("idx.train_labels", ""));
    d.train = train_pc > 0 ? make_subset(full_train, train_pc, subset_seed, 0) : full_train;
    if (test_imgs == train_imgs) {
      // single source file: the test subset skips the train picks of the
      // same seed lineage, keeping the splits disjoint
      d.test = make_subset(full_train, test_pc > 0 ? test_pc : 1, subset_seed, train_pc);
    } else {
      Dataset full_test = load_mnist(test_imgs, cfg.get_string("idx.test_labels", ""));
      d.test = test_pc > 0 ? make_subset(full_test, test_pc, subset_seed, 0) : full_test;
    }
    d.train.split = "train";
    d.test.split = "test";
  } else {
    throw ConfigError("unknown dataset kind: " + kind);
  }
  return d;
}

TrainOptions options_from_config(const RunConfig& cfg) {
  TrainOptions opt;
  opt.method = method_from_name(cfg.get_string("method", "eqprop"));
  opt.m = static_cast<int>(cfg.get_int("m", 1));
  opt.rates.w = cfg.get_double("rates.w", 0.01);
  opt.rates.j = cfg.get_double("rates.j", 0.01);
  opt.rates.h = cfg.get_double("rates.h", 0.002);
  opt.rates.o = cfg.get_double("rates.o", 0.002);
  opt.sampler = sampler_from_config(cfg);
  opt.seed = cfg.get_u64("seed", 1);
  opt.nudge_strength = cfg.get_double("nudge_strength", 1.0);
  opt.fallback_threshold = cfg.get_double("fallback_threshold", 0.8);
  opt.parallel = cfg.get_bool("parallel", true);
  return opt;
}

NetworkParams initial_params(const RunConfig& cfg, const Dataset& train) {
  const int hidden = static_cast<int>(cfg.get_int("net.hidden", 16));
  const int redundancy = static_cast<int>(cfg.get_int("net.redundancy", 4));
  return init_params(train.n_pixels, hidden, train.n_classes, redundancy,
                     derive_seed(cfg.get_u64("seed", 1), 0x1217ULL));
}

std::vector<int> parse_layer_list(const std::string& text) {
  std::vector<int> layers;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) layers.push_back(std::stoi(cell));
  return layers;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg = RunConfig::from_file(config_path);
  LockFile lock{out_dir};
  LoadedData data = datasets_from_config(cfg);
  TrainOptions opt = options_from_config(cfg);
  const int epochs = static_cast<int>(cfg.get_int("epochs", 10));
  const bool wall = cfg.get_bool("record_wall_time", false);
  const fs::path out(out_dir);

  TrainRun run;
  if (opt.method == TrainMethod::backprop) {
    BackpropHyper hyper;
    hyper.learning_rate = cfg.get_double("backprop.lr", 0.05);
    hyper.batch_size = static_cast<int>(cfg.get_int("backprop.batch", 10));
    NetworkParams params = initial_params(cfg, data.train);
    run = backprop_train(params, data.train, data.test, epochs, hyper, opt.seed, wall);
    save_checkpoint(params, (out / "checkpoint.txt").string(), cfg.hash());
  } else if (opt.method == TrainMethod::deep_sweep) {
    std::vector<int> layers = parse_layer_list(cfg.get_string("deep.layers", "8,8"));
    const int redundancy = static_cast<int>(cfg.get_int("net.redundancy", 4));
    DeepNetworkParams params =
        init_deep_params(data.train.n_pixels, layers, data.train.n_classes, redundancy,
                         derive_seed(opt.seed, 0x1217ULL));
    DeepPassOptions dopt;
    dopt.m = static_cast<int>(cfg.get_int("deep.m", cfg.get_int("m", 5)));
    dopt.rates = opt.rates;
    dopt.sampler = opt.sampler;
    dopt.seed = opt.seed;
    dopt.nudge_strength = opt.nudge_strength;
    dopt.parallel = opt.parallel;
    auto records = deep_train(params, data.train, epochs, dopt, &data.test);
    run.method = "deep_sweep";
    run.m = dopt.m;
    run.seed = opt.seed;
    run.dataset_hash = data.train.provenance_hash;
    for (const auto& r : records) run.records.push_back({r.pass, r.train_error, r.test_error, 0.0});
    save_deep_checkpoint(params, (out / "checkpoint.txt").string(), cfg.hash());
  } else {
    NetworkParams params = initial_params(cfg, data.train);
    run = train(params, data.train, data.test, epochs, opt, wall);
    save_checkpoint(params, (out / "checkpoint.txt").string(), cfg.hash());
  }
  run.config_hash = cfg.hash();
  write_run_csv((out / "run.csv").string(), run);

  const auto& last = run.records.back();
  std::cout << "method=" << run.method << " epochs=" << run.records.size()
            << " final_train_error=" << last.train_error << " final_test_error=" << last.test_error
            << "\n";
  std::cout << "wrote " << (out / "run.csv").string() << "\n";
  return 0;
}

int cmd_infer(const std::string& checkpoint_path, const std::string& config_path, int image_id,
              const std::string& split, std::uint64_t seed) {
  RunConfig cfg = RunConfig::from_file(config_path);
  LoadedData data = datasets_from_config(cfg);
  const Dataset& ds = split == "train" ? data.train : data.test;
  if (image_id < 0 || image_id >= ds.size())
    throw ContractError("image id out of range (dataset has " + std::to_string(ds.size()) +
                        " images)");
  const InputImage& img = ds.images[static_cast<std::size_t>(image_id)];

  NetworkParams params = load_checkpoint(checkpoint_path);
  AnnealConfig sampler = sampler_from_config(cfg);
  sampler.rng_seed = seed;

  IsingProblem problem = build_system_hamiltonian(params, img);
  AnnealResult r = forward_anneal(problem, sampler);
  int predicted = decode(r.state, params);

  std::cout << "class=" << predicted << " label=" << img.label << " energy=" << r.energy
            << " groups=";
  for (int c = 0; c < params.n_classes; ++c) {
    int sum = 0;
    for (int k = 0; k < params.redundancy; ++k)
      sum += r.state[params.n_hidden + c * params.redundancy + k];
    std::cout << (c ? "," : "") << sum;
  }
  std::cout << "\n";
  return 0;
}

int cmd_landscape(const std::string& checkpoint_path, const std::string& config_path, int samples,
                  int epoch_tag, const std::string& out_dir, bool svg) {
  RunConfig cfg = RunConfig::from_file(config_path);
  LockFile lock{out_dir};
  LoadedData data = datasets_from_config(cfg);
  NetworkParams params = load_checkpoint(checkpoint_path);
  AnnealConfig sampler = sampler_from_config(cfg);

  LandscapeSnapshot snap = landscape_snapshot(params, data.test, samples, sampler,
                                              cfg.get_u64("seed", 1), epoch_tag,
                                              cfg.get_bool("parallel", true));
  const fs::path out(out_dir);
  write_snapshot_csv((out / "snapshot.csv").string(), snap, cfg.hash());
  if (svg) {
    std::ofstream f(out / "snapshot.svg");
    f << render_snapshot_svg(snap);
  }
  std::cout << "points=" << snap.points.size() << " stress=" << snap.stress
            << " separation=" << cluster_separation(snap) << "\n";
  std::cout << "wrote " << (out / "snapshot.csv").string() << "\n";
  return 0;
}

int cmd_fit(const std::string& csv_path, int from_epoch, int to_epoch, const std::string& use) {
  TrainRun run = read_run_csv(csv_path);
  std::vector<std::pair<int, double>> curve;
  for (const auto& r : run.records)
    curve.push_back({r.epoch, use == "test" ? r.test_error : r.train_error});
  ScalingFit fit = fit_scaling(curve, from_epoch, to_epoch);
  std::printf("z=%.6f r2=%.6f intercept=%.6f points=%d excluded_zero=%d range=[%d,%d]\n", fit.z,
              fit.r_squared, fit.log_intercept, fit.points_used, fit.zero_points_excluded,
              fit.first_epoch, fit.last_epoch);
  return 0;
}

int cmd_compare(const std::vector<std::string>& csv_paths, const std::string& out_dir, bool force,
                const std::vector<std::string>& references, int from_epoch, int reference_epoch) {
  std::vector<TrainRun> runs;
  for (const auto& p : csv_paths) runs.push_back(read_run_csv(p));
  std::vector<std::pair<std::string, double>> refs;
  for (const auto& r : references) {
    auto pos = r.find(':');
    if (pos == std::string::npos) throw ConfigError("--reference wants label:z, got " + r);
    refs.push_back({r.substr(0, pos), std::stod(r.substr(pos + 1))});
  }
  CompareReport rep = compare_runs(runs, refs, from_epoch, reference_epoch, force);
  std::cout << rep.text;
  if (!out_dir.empty()) {
    LockFile lock{out_dir};
    write_compare_csv((fs::path(out_dir) / "compare.csv").string(), rep,
                      runs.empty() ? "" : runs[0].config_hash);
    std::cout << "wrote " << (fs::path(out_dir) / "compare.csv").string() << "\n";
  }
  return 0;
}

// amplification study: exact target weights on a small network's decode mask
int cmd_coherent(const std::string& out_dir, int n_hidden, int n_classes, int redundancy,
                 double t_f, int n_steps, std::uint64_t seed) {
  LockFile lock{out_dir};
  NetworkParams params = init_params(4, n_hidden, n_classes, redundancy, seed);
  const int n = params.n_spins();
  if (n > 16) throw CapacityError("coherent experiment limited to 16 spins");

  std::ofstream f(fs::path(out_dir) / "coherent.csv");
  f << "n_spins,p_target,k,queries,success_prob,method\n";

  auto mask = target_mask(params, 0, AmplifyTarget::wrong);
  std::size_t dim = 1ULL << n;
  long long n_target = 0;
  for (auto b : mask) n_target += b;
  if (n_target == 0 || n_target == static_cast<long long>(dim))
    throw ContractError("degenerate decode mask");

  for (double p : {0.04, 0.01}) {
    QuantumState psi;
    psi.amp.assign(dim, 0.0);
    double amp_t = std::sqrt(p / static_cast<double>(n_target));
    double amp_o = std::sqrt((1.0 - p) / static_cast<double>(dim - n_target));
    for (std::size_t k = 0; k < dim; ++k) psi.amp[k] = mask[k] ? amp_t : amp_o;
    AmplifyResult res = amplitude_amplify_state(psi, mask);
    f << n << "," << p << "," << res.k << "," << res.oracle_queries << "," << res.success_prob
      << ",amplified\n";
    int direct = static_cast<int>(std::ceil(std::log(0.1) / std::log(1.0 - p)));
    f << n << "," << p << ",0," << direct << ",0.9,direct\n";
    std::cout << "p=" << p << " k=" << res.k << " queries=" << res.oracle_queries
              << " success=" << res.success_prob << " direct_queries=" << direct << "\n";
  }

  // full protocol on the annealed state of a random image
  InputImage img;
  img.pixels = {0.2, 0.8, 0.4, 0.6};
  IsingProblem problem = build_system_hamiltonian(params, img);
  AnnealSchedule schedule;
  schedule.t_f = t_f;
  schedule.n_steps = n_steps;
  QuantumState psi = anneal_evolve(problem, schedule);
  Decomposition dec = decompose(psi, params, 0);
  if (dec.p_correct > 0.0 && dec.p_correct < 1.0) {
    AmplifyResult res = amplitude_amplify(problem, schedule, params, 0, AmplifyTarget::wrong);
    f << n << "," << 1.0 - dec.p_correct << "," << res.k << "," << res.oracle_queries << ","
      << res.success_prob << ",amplified_anneal\n";
    std::cout << "annealed p_wrong=" << 1.0 - dec.p_correct << " k=" << res.k
              << " success=" << res.success_prob << "\n";
  }
  std::cout << "wrote " << (fs::path(out_dir) / "coherent.csv").string() << "\n";
  return 0;
}

int cmd_oracle(int trials, std::uint64_t seed) {
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int n_hidden = 4 + static_cast<int>(rng.below(9));    // 4..12
    const int n_classes = 2 + static_cast<int>(rng.below(2));   // 2..3
    const int redundancy = n_classes == 2 ? 4 : 4;              // <= 12 outputs
    NetworkParams params = init_params(8, n_hidden, n_classes, redundancy, rng.next());
    InputImage img;
    img.pixels.resize(8);
    for (auto& x : img.pixels) x = rng.uniform();
    IsingProblem problem = build_system_hamiltonian(params, img);
    auto [gs, ge] = brute_force_ground_state(problem);
    AnnealResult r = forward_anneal(problem, thorough_config(rng.next()));
    if (std::abs(r.energy - ge) <= 1e-9 * std::max(1.0, std::abs(ge))) ++hits;
  }
  std::printf("oracle agreement: %d/%d anneals reached the exact ground-state energy\n", hits,
              trials);
  const bool ok = hits * 100 >= trials * 95;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int cli_dispatch(std::vector<std::string> args) {
  CLI::App app{"Ising network training with annealer-style samplers"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", checkpoint_path, split = "test", use = "train";
  std::string csv_path;
  std::vector<std::string> csv_paths, references;
  int image_id = 0, samples = 100, epoch_tag = 0, from_epoch = 2, to_epoch = 1 << 30;
  int reference_epoch = 100, trials = 100, n_hidden = 4, n_classes = 2, redundancy = 4;
  int n_steps = 400;
  double t_f = 20.0;
  std::uint64_t seed = 1;
  bool svg = false, force = false;

  auto* train_cmd = app.add_subcommand("train", "train a network from a run configuration");
  train_cmd->add_option("--config", config_path, "run configuration file")->required();
  train_cmd->add_option("--out", out_dir, "output directory");

  auto* infer_cmd = app.add_subcommand("infer", "classify one dataset image with a checkpoint");
  infer_cmd->add_option("--checkpoint", checkpoint_path)->required();
  infer_cmd->add_option("--config", config_path, "config that defines the dataset")->required();
  infer_cmd->add_option("--image-id", image_id)->required();
  infer_cmd->add_option("--split", split, "train|test");
  infer_cmd->add_option("--seed", seed);

  auto* land_cmd = app.add_subcommand("landscape", "sample and project low-energy states");
  land_cmd->add_option("--checkpoint", checkpoint_path)->required();
  land_cmd->add_option("--config", config_path)->required();
  land_cmd->add_option("--samples", samples, "states per test image");
  land_cmd->add_option("--epoch-tag", epoch_tag);
  land_cmd->add_option("--out", out_dir);
  land_cmd->add_flag("--svg", svg, "also render snapshot.svg");

  auto* fit_cmd = app.add_subcommand("fit", "fit the scaling exponent of a run CSV");
  fit_cmd->add_option("--csv", csv_path)->required();
  fit_cmd->add_option("--from", from_epoch);
  fit_cmd->add_option("--to", to_epoch);
  fit_cmd->add_option("--use", use, "train|test error column");

  auto* cmp_cmd = app.add_subcommand("compare", "compare scaling across run CSVs");
  cmp_cmd->add_option("--csv", csv_paths)->required()->expected(-1);
  cmp_cmd->add_option("--out", out_dir)->default_val(std::string{});
  cmp_cmd->add_flag("--force", force, "allow mixing dataset hashes");
  cmp_cmd->add_option("--reference", references, "label:z rows echoed for display");
  cmp_cmd->add_option("--from", from_epoch);
  cmp_cmd->add_option("--epoch", reference_epoch, "reference epoch for resource multiples");

  auto* coh_cmd = app.add_subcommand("coherent", "small-network amplitude-amplification study");
  coh_cmd->add_option("--out", out_dir);
  coh_cmd->add_option("--hidden", n_hidden);
  coh_cmd->add_option("--classes", n_classes);
  coh_cmd->add_option("--redundancy", redundancy);
  coh_cmd->add_option("--tf", t_f);
  coh_cmd->add_option("--steps", n_steps);
  coh_cmd->add_option("--seed", seed);

  auto* oracle_cmd = app.add_subcommand("oracle", "validate the sampler against enumeration");
  oracle_cmd->add_option("--trials", trials);
  oracle_cmd->add_option("--seed", seed);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(config_path, out_dir);
    if (infer_cmd->parsed()) return cmd_infer(checkpoint_path, config_path, image_id, split, seed);
    if (land_cmd->parsed())
      return cmd_landscape(checkpoint_path, config_path, samples, epoch_tag, out_dir, svg);
    if (fit_cmd->parsed()) return cmd_fit(csv_path, from_epoch, to_epoch, use);
    if (cmp_cmd->parsed())
      return cmd_compare(csv_paths, out_dir, force, references, from_epoch, reference_epoch);
    if (coh_cmd->parsed())
      return cmd_coherent(out_dir, n_hidden, n_classes, redundancy, t_f, n_steps, seed);
    if (oracle_cmd->parsed()) return cmd_oracle(trials, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}

}  // namespace spinnet
