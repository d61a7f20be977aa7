#include "spinnet/backprop.hpp"

#include <chrono>
#include <cmath>

#include "spinnet/rng.hpp"

namespace spinnet {

void BackpropHyper::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

namespace {

struct Forward {
  std::vector<double> pre;     // n_hidden, pre-activation
  std::vector<double> hidden;  // relu(pre)
  std::vector<double> out;     // n_output
  std::vector<double> logits;  // n_classes, group sums
  std::vector<double> prob;    // softmax
};

Forward forward_pass(const NetworkParams& p, const InputImage& img) {
  if (static_cast<int>(img.pixels.size()) != p.n_input)
    throw DimensionError("pixel count does not match n_input");
  Forward f;
  f.pre.resize(static_cast<std::size_t>(p.n_hidden));
  f.hidden.resize(static_cast<std::size_t>(p.n_hidden));
  for (int i = 0; i < p.n_hidden; ++i) {
    double acc = p.b_h[static_cast<std::size_t>(i)];
    const double* row = p.W.data() + static_cast<std::size_t>(i) * p.n_input;
    for (int a = 0; a < p.n_input; ++a) acc += row[a] * img.pixels[static_cast<std::size_t>(a)];
    f.pre[static_cast<std::size_t>(i)] = acc;
    f.hidden[static_cast<std::size_t>(i)] = acc > 0.0 ? acc : 0.0;
  }
  f.out.assign(static_cast<std::size_t>(p.n_output), 0.0);
  for (int i = 0; i < p.n_hidden; ++i) {
    double hi = f.hidden[static_cast<std::size_t>(i)];
    if (hi == 0.0) continue;
    const double* jrow = p.J.data() + static_cast<std::size_t>(i) * p.n_output;
    for (int a = 0; a < p.n_output; ++a) f.out[static_cast<std::size_t>(a)] += hi * jrow[a];
  }
  for (int a = 0; a < p.n_output; ++a) f.out[static_cast<std::size_t>(a)] += p.b_o[static_cast<std::size_t>(a)];
  f.logits.assign(static_cast<std::size_t>(p.n_classes), 0.0);
  for (int a = 0; a < p.n_output; ++a)
    f.logits[static_cast<std::size_t>(a / p.redundancy)] += f.out[static_cast<std::size_t>(a)];
  double mx = f.logits[0];
  for (double v : f.logits) mx = std::max(mx, v);
  double z = 0.0;
  f.prob.resize(f.logits.size());
  for (std::size_t c = 0; c < f.logits.size(); ++c) {
    f.prob[c] = std::exp(f.logits[c] - mx);
    z += f.prob[c];
  }
  for (auto& v : f.prob) v /= z;
  return f;
}

}  // namespace

double mlp_loss(const NetworkParams& params, const std::vector<const InputImage*>& batch) {
  if (batch.empty()) throw ContractError("empty batch");
  double loss = 0.0;
  for (const InputImage* img : batch) {
    if (img->label < 0 || img->label >= params.n_classes)
      throw ContractError("image label out of range");
    Forward f = forward_pass(params, *img);
    loss += -std::log(std::max(f.prob[static_cast<std::size_t>(img->label)], 1e-300));
  }
  return loss / static_cast<double>(batch.size());
}

MlpGradients mlp_gradient(const NetworkParams& params, const std::vector<const InputImage*>& batch) {
  if (batch.empty()) throw ContractError("empty batch");
  MlpGradients g;
  g.W.assign(params.W.size(), 0.0);
  g.J.assign(params.J.size(), 0.0);
  g.b_h.assign(params.b_h.size(), 0.0);
  g.b_o.assign(params.b_o.size(), 0.0);

  for (const InputImage* img : batch) {
    Forward f = forward_pass(params, *img);
    // dL/dlogit_c = p_c - [c == y]; out unit gradient is its group's value
    std::vector<double> dlogit(f.prob);
    dlogit[static_cast<std::size_t>(img->label)] -= 1.0;

    std::vector<double> dout(static_cast<std::size_t>(params.n_output));
    for (int a = 0; a < params.n_output; ++a)
      dout[static_cast<std::size_t>(a)] = dlogit[static_cast<std::size_t>(a / params.redundancy)];

    for (int a = 0; a < params.n_output; ++a) g.b_o[static_cast<std::size_t>(a)] += dout[static_cast<std::size_t>(a)];
    for (int i = 0; i < params.n_hidden; ++i) {
      double hi = f.hidden[static_cast<std::size_t>(i)];
      double* gj = g.J.data() + static_cast<std::size_t>(i) * params.n_output;
      const double* jrow = params.J.data() + static_cast<std::size_t>(i) * params.n_output;
      double dh = 0.0;
      for (int a = 0; a < params.n_output; ++a) {
        gj[a] += hi * dout[static_cast<std::size_t>(a)];
        dh += jrow[a] * dout[static_cast<std::size_t>(a)];
      }
      if (f.pre[static_cast<std::size_t>(i)] > 0.0) {
        g.b_h[static_cast<std::size_t>(i)] += dh;
        double* gw = g.W.data() + static_cast<std::size_t>(i) * params.n_input;
        for (int a = 0; a < params.n_input; ++a)
          gw[a] += dh * img->pixels[static_cast<std::size_t>(a)];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : g.W) v *= inv;
  for (auto& v : g.J) v *= inv;
  for (auto& v : g.b_h) v *= inv;
  for (auto& v : g.b_o) v *= inv;
  return g;
}

int mlp_predict(const NetworkParams& params, const InputImage& image) {
  Forward f = forward_pass(params, image);
  int best = 0;
  bool tie = false;
  for (int c = 1; c < params.n_classes; ++c) {
    if (f.logits[static_cast<std::size_t>(c)] > f.logits[static_cast<std::size_t>(best)]) {
      best = c;
      tie = false;
    } else if (f.logits[static_cast<std::size_t>(c)] == f.logits[static_cast<std::size_t>(best)]) {
      tie = true;
    }
  }
  return tie ? -1 : best;
}

TrainRun backprop_train(NetworkParams& params, const Dataset& train_set, const Dataset& test_set,
                        int epochs, const BackpropHyper& hyper, std::uint64_t seed,
                        bool record_wall_time) {
  hyper.validate();
  if (train_set.size() < 1) throw ContractError("empty training dataset");
  params.validate();

  TrainRun run;
  run.method = "backprop";
  run.m = 1;
  run.seed = seed;
  run.dataset_hash = train_set.provenance_hash;

  std::vector<int> order(static_cast<std::size_t>(train_set.size()));
  for (int k = 0; k < train_set.size(); ++k) order[static_cast<std::size_t>(k)] = k;

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    int train_errors = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += static_cast<std::size_t>(hyper.batch_size)) {
      std::vector<const InputImage*> batch;
      for (std::size_t k = pos; k < std::min(order.size(), pos + static_cast<std::size_t>(hyper.batch_size)); ++k)
        batch.push_back(&train_set.images[static_cast<std::size_t>(order[k])]);
      for (const InputImage* img : batch)
        if (mlp_predict(params, *img) != img->label) ++train_errors;

      MlpGradients g = mlp_gradient(params, batch);
      const double lr = hyper.learning_rate;
      for (std::size_t k = 0; k < params.W.size(); ++k) params.W[k] -= lr * g.W[k];
      for (std::size_t k = 0; k < params.J.size(); ++k) params.J[k] -= lr * g.J[k];
      for (std::size_t k = 0; k < params.b_h.size(); ++k) params.b_h[k] -= lr * g.b_h[k];
      for (std::size_t k = 0; k < params.b_o.size(); ++k) params.b_o[k] -= lr * g.b_o[k];
      for (double v : params.b_o)
        if (!std::isfinite(v))
          throw ContractError("backprop diverged: non-finite parameters at epoch " +
                              std::to_string(epoch));
    }
    double tl = mlp_loss(params, {&train_set.images[0]});
    if (!std::isfinite(tl))
      throw ContractError("backprop diverged: non-finite loss at epoch " + std::to_string(epoch));

    int test_errors = 0;
    for (const auto& img : test_set.images)
      if (mlp_predict(params, img) != img.label) ++test_errors;

    auto t1 = std::chrono::steady_clock::now();
    run.records.push_back(
        {epoch, static_cast<double>(train_errors) / train_set.size(),
         test_set.size() > 0 ? static_cast<double>(test_errors) / test_set.size() : 0.0,
         record_wall_time ? std::chrono::duration<double>(t1 - t0).count() : 0.0});
  }
  return run;
}

}  // namespace spinnet
