#include "spinnet/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace spinnet {

void SpinState::validate() const {
  for (std::int8_t s : spins) {
    if (s != 1 && s != -1) throw ContractError("spin state entry is not +-1");
  }
}

int hamming(const SpinState& a, const SpinState& b) {
  if (a.size() != b.size()) throw DimensionError("hamming: state lengths differ");
  int d = 0;
  for (int i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

IsingProblem::IsingProblem(int n_spins, std::vector<Coupling> couplings,
                           std::vector<double> biases, std::vector<std::int8_t> frozen,
                           std::vector<LayerSpan> layers)
    : n_spins_(n_spins),
      couplings_(std::move(couplings)),
      biases_(std::move(biases)),
      frozen_(std::move(frozen)),
      layers_(std::move(layers)) {
  if (n_spins_ < 0) throw ContractError("negative spin count");
  if (static_cast<int>(biases_.size()) != n_spins_)
    throw DimensionError("bias vector length does not match spin count");
  if (frozen_.empty()) {
    frozen_.assign(static_cast<std::size_t>(n_spins_), 0);
  } else if (static_cast<int>(frozen_.size()) != n_spins_) {
    throw DimensionError("frozen mask length does not match spin count");
  }
  for (std::int8_t f : frozen_) {
    if (f != 0 && f != 1 && f != -1) throw ContractError("frozen mask entry not in {-1,0,+1}");
    n_frozen_ += (f != 0);
  }

  for (auto& c : couplings_) {
    if (c.i == c.j) throw ContractError("self-coupling is not allowed");
    if (c.i > c.j) std::swap(c.i, c.j);
    if (c.i < 0 || c.j >= n_spins_) throw DimensionError("coupling index out of range");
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  for (std::size_t k = 1; k < couplings_.size(); ++k) {
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw ContractError("duplicate coupling pair");
  }

  if (!layers_.empty()) {
    auto layer_of = [&](int s) {
      for (std::size_t l = 0; l < layers_.size(); ++l)
        if (s >= layers_[l].begin && s < layers_[l].end) return static_cast<int>(l);
      return -1;
    };
    for (const auto& c : couplings_) {
      int li = layer_of(c.i), lj = layer_of(c.j);
      if (li >= 0 && li == lj) throw ContractError("coupling inside a single layer");
    }
  }

  adj_offsets_.assign(static_cast<std::size_t>(n_spins_) + 1, 0);
  for (const auto& c : couplings_) {
    ++adj_offsets_[static_cast<std::size_t>(c.i) + 1];
    ++adj_offsets_[static_cast<std::size_t>(c.j) + 1];
  }
  for (int i = 0; i < n_spins_; ++i) adj_offsets_[i + 1] += adj_offsets_[i];
  adj_.resize(couplings_.size() * 2);
  std::vector<int> cursor(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (const auto& c : couplings_) {
    adj_[static_cast<std::size_t>(cursor[c.i]++)] = {c.j, c.value};
    adj_[static_cast<std::size_t>(cursor[c.j]++)] = {c.i, c.value};
  }
}

void IsingProblem::check_state(const SpinState& state) const {
  if (state.size() != n_spins_) throw DimensionError("state length does not match spin count");
  for (int i = 0; i < n_spins_; ++i) {
    if (frozen_[i] != 0 && state[i] != frozen_[i])
      throw ContractError("state disagrees with frozen mask");
  }
}

double IsingProblem::energy(const SpinState& state) const {
  check_state(state);
  double e = 0.0;
  for (const auto& c : couplings_) e += c.value * state[c.i] * state[c.j];
  for (int i = 0; i < n_spins_; ++i) e += biases_[i] * state[i];
  return e;
}

double IsingProblem::local_field(const SpinState& state, int i) const {
  double f = biases_[i];
  for (int k = adj_offsets_[i]; k < adj_offsets_[i + 1]; ++k)
    f += adj_[k].second * state[adj_[k].first];
  return f;
}

namespace {

struct Enumerator {
  const IsingProblem& p;
  std::vector<int> free_idx;       // spins toggled by enumeration
  SpinState state;                 // current full state
  std::vector<double> field;       // local fields of all spins
  double energy;

  explicit Enumerator(const IsingProblem& prob, const std::vector<int>& free_spins)
      : p(prob), free_idx(free_spins) {
    state = SpinState::filled(p.n_spins(), -1);
    for (int i = 0; i < p.n_spins(); ++i)
      if (p.frozen()[i] != 0) state[i] = p.frozen()[i];
    field.resize(static_cast<std::size_t>(p.n_spins()));
    for (int i = 0; i < p.n_spins(); ++i) field[i] = p.local_field(state, i);
    energy = p.energy(state);
  }

  void flip(int spin) {
    energy += -2.0 * state[spin] * field[spin];
    state[spin] = static_cast<std::int8_t>(-state[spin]);
    for (int k = p.adj_offsets()[spin]; k < p.adj_offsets()[spin + 1]; ++k)
      field[p.adj()[k].first] += 2.0 * p.adj()[k].second * state[spin];
  }
};

std::vector<int> free_spins_of(const IsingProblem& p) {
  std::vector<int> v;
  for (int i = 0; i < p.n_spins(); ++i)
    if (p.frozen()[i] == 0) v.push_back(i);
  return v;
}

// Free spins split into the two layer spans; empty if the problem is not
// two-layer or a free spin falls outside both spans.
bool split_two_layers(const IsingProblem& p, std::vector<int>& a, std::vector<int>& b) {
  if (p.layers().size() != 2) return false;
  a.clear();
  b.clear();
  for (int i : free_spins_of(p)) {
    if (i >= p.layers()[0].begin && i < p.layers()[0].end)
      a.push_back(i);
    else if (i >= p.layers()[1].begin && i < p.layers()[1].end)
      b.push_back(i);
    else
      return false;
  }
  return true;
}

struct Candidate {
  SpinState state;
  double energy;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.state < b.state;
}

// Gray-code enumeration over `free_idx`, calling visit(state, energy) for
// every assignment. Caller restores nothing; the enumerator is consumed.
template <typename Visit>
void gray_enumerate(Enumerator& en, Visit&& visit) {
  const int u = static_cast<int>(en.free_idx.size());
  visit(en.state, en.energy);
  if (u == 0) return;
  const std::uint64_t total = 1ULL << u;
  for (std::uint64_t k = 1; k < total; ++k) {
    int bit = std::countr_zero(k);
    en.flip(en.free_idx[static_cast<std::size_t>(u - 1 - bit)]);
    visit(en.state, en.energy);
  }
}

// Closes the per-spin side of a conditional enumeration: each spin in
// `closed` is set to -sign(field), sign(0) -> +1, which is both the
// minimizer and the lexicographically smallest choice on ties.
void close_side(Enumerator& en, const std::vector<int>& closed) {
  for (int s : closed) {
    std::int8_t want = en.field[s] >= 0.0 ? std::int8_t{-1} : std::int8_t{1};
    if (en.state[s] != want) en.flip(s);
  }
}

Candidate conditional_ground_state(const IsingProblem& p, const std::vector<int>& enum_side,
                                   const std::vector<int>& closed_side) {
  Enumerator en(p, enum_side);
  Candidate best{SpinState{}, 0.0};
  bool first = true;
  gray_enumerate(en, [&](const SpinState&, double) {
    close_side(en, closed_side);
    Candidate cur{en.state, en.energy};
    if (first || better(cur, best)) {
      best = cur;
      first = false;
    }
  });
  return best;
}

}  // namespace

std::pair<SpinState, double> brute_force_ground_state(const IsingProblem& problem,
                                                      int enum_limit) {
  std::vector<int> free_idx = free_spins_of(problem);
  const int u = static_cast<int>(free_idx.size());
  Candidate best;
  std::vector<int> a, b;
  const bool two_layer = split_two_layers(problem, a, b);
  if (two_layer && static_cast<int>(std::min(a.size(), b.size())) <= enum_limit) {
    // enumerating one layer and closing the other per-spin is never slower
    // than the full sweep, so take it whenever the metadata allows
    if (a.size() > b.size()) std::swap(a, b);
    best = conditional_ground_state(problem, a, b);
  } else if (u <= enum_limit) {
    Enumerator en(problem, free_idx);
    bool first = true;
    best = Candidate{en.state, en.energy};
    gray_enumerate(en, [&](const SpinState& s, double e) {
      Candidate cur{s, e};
      if (first || better(cur, best)) {
        best = cur;
        first = false;
      }
    });
  } else {
    throw CapacityError("problem too large for exact enumeration");
  }
  // audit-path energy: full re-evaluation, not the incremental value
  double e = problem.energy(best.state);
  return {best.state, e};
}

namespace {

// k lowest completions of the closed side given flip costs 2|field| per spin.
// Returns index subsets by increasing cost sum (classic k-smallest subset sums).
std::vector<std::pair<double, std::vector<int>>> k_best_subsets(const std::vector<double>& costs,
                                                                int k) {
  std::vector<int> order(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return costs[x] < costs[y]; });

  using Node = std::pair<double, std::vector<int>>;  // (sum, chosen sorted-positions)
  auto cmp = [](const Node& a, const Node& b) { return a.first > b.first; };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> pq(cmp);
  std::vector<std::pair<double, std::vector<int>>> out;
  pq.push({0.0, {}});
  while (!pq.empty() && static_cast<int>(out.size()) < k) {
    auto [sum, chosen] = pq.top();
    pq.pop();
    std::vector<int> subset;
    for (int pos : chosen) subset.push_back(order[static_cast<std::size_t>(pos)]);
    out.push_back({sum, subset});
    int start = chosen.empty() ? 0 : chosen.back() + 1;
    if (!chosen.empty()) {
      // replace last element with the next position
      int last = chosen.back();
      if (last + 1 < static_cast<int>(costs.size())) {
        auto next = chosen;
        next.back() = last + 1;
        pq.push({sum - costs[order[static_cast<std::size_t>(last)]] +
                     costs[order[static_cast<std::size_t>(last + 1)]],
                 next});
      }
    }
    if (start < static_cast<int>(costs.size())) {
      auto next = chosen;
      next.push_back(start);
      pq.push({sum + costs[order[static_cast<std::size_t>(start)]], next});
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<SpinState, double>> low_energy_spectrum(const IsingProblem& problem, int k,
                                                               int enum_limit) {
  if (k < 1) throw ContractError("spectrum size must be >= 1");
  std::vector<int> free_idx = free_spins_of(problem);
  const int u = static_cast<int>(free_idx.size());

  std::vector<Candidate> found;
  auto keep = [&](Candidate&& cur) {
    // bounded worst-out collection of the k best
    if (static_cast<int>(found.size()) < k) {
      found.push_back(std::move(cur));
      std::push_heap(found.begin(), found.end(), better);
    } else if (better(cur, found.front())) {
      std::pop_heap(found.begin(), found.end(), better);
      found.back() = std::move(cur);
      std::push_heap(found.begin(), found.end(), better);
    }
  };

  if (u <= enum_limit) {
    if (u < 63 && k > (1LL << u)) k = static_cast<int>(1LL << u);
    Enumerator en(problem, free_idx);
    gray_enumerate(en, [&](const SpinState& s, double e) { keep(Candidate{s, e}); });
  } else {
    std::vector<int> a, b;
    if (!split_two_layers(problem, a, b))
      throw CapacityError("problem too large for exact enumeration");
    if (static_cast<int>(std::min(a.size(), b.size())) > enum_limit)
      throw CapacityError("smaller free layer exceeds the enumeration limit");
    if (a.size() > b.size()) std::swap(a, b);
    Enumerator en(problem, a);
    gray_enumerate(en, [&](const SpinState&, double) {
      close_side(en, b);
      double base = en.energy;
      std::vector<double> costs(b.size());
      for (std::size_t t = 0; t < b.size(); ++t) costs[t] = 2.0 * std::abs(en.field[b[t]]);
      for (auto& [extra, subset] : k_best_subsets(costs, k)) {
        if (static_cast<int>(found.size()) == k && base + extra > found.front().energy) break;
        Candidate cur{en.state, base + extra};
        for (int t : subset) {
          int s = b[static_cast<std::size_t>(t)];
          cur.state[s] = static_cast<std::int8_t>(-cur.state[s]);
        }
        keep(std::move(cur));
      }
    });
  }

  std::sort(found.begin(), found.end(), better);
  std::vector<std::pair<SpinState, double>> out;
  out.reserve(found.size());
  for (auto& c : found) out.push_back({c.state, problem.energy(c.state)});
  return out;
}

void save_problem(const IsingProblem& problem, std::ostream& out) {
  char buf[64];
  out << "ising " << problem.n_spins() << "\n";
  for (const auto& c : problem.couplings()) {
    std::snprintf(buf, sizeof buf, "%.17g", c.value);
    out << "c " << c.i << " " << c.j << " " << buf << "\n";
  }
  for (int i = 0; i < problem.n_spins(); ++i) {
    if (problem.biases()[i] != 0.0) {
      std::snprintf(buf, sizeof buf, "%.17g", problem.biases()[i]);
      out << "b " << i << " " << buf << "\n";
    }
  }
  for (int i = 0; i < problem.n_spins(); ++i) {
    if (problem.frozen()[i] != 0)
      out << "f " << i << " " << (problem.frozen()[i] > 0 ? "+1" : "-1") << "\n";
  }
  for (const auto& l : problem.layers()) out << "l " << l.begin << " " << l.end << "\n";
}

IsingProblem load_problem(std::istream& in) {
  std::string line;
  long long offset = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("problem parse error at byte " + std::to_string(offset) + ": " + what);
  };

  int n = -1;
  std::vector<Coupling> couplings;
  std::vector<double> biases;
  std::vector<std::int8_t> frozen;
  std::vector<LayerSpan> layers;

  while (std::getline(in, line)) {
    std::size_t line_len = line.size() + 1;
    std::string_view sv(line);
    if (!sv.empty() && sv.front() != '#') {
      std::istringstream ls{line};
      std::string tag;
      ls >> tag;
      if (tag == "ising") {
        if (n >= 0) fail("duplicate header");
        if (!(ls >> n) || n < 0) fail("bad spin count");
        biases.assign(static_cast<std::size_t>(n), 0.0);
        frozen.assign(static_cast<std::size_t>(n), 0);
      } else if (n < 0) {
        fail("missing 'ising <n>' header");
      } else if (tag == "c") {
        Coupling c{};
        if (!(ls >> c.i >> c.j >> c.value)) fail("bad coupling record");
        couplings.push_back(c);
      } else if (tag == "b") {
        int i;
        double v;
        if (!(ls >> i >> v) || i < 0 || i >= n) fail("bad bias record");
        biases[static_cast<std::size_t>(i)] = v;
      } else if (tag == "f") {
        int i, v;
        if (!(ls >> i >> v) || i < 0 || i >= n || (v != 1 && v != -1)) fail("bad frozen record");
        frozen[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(v);
      } else if (tag == "l") {
        LayerSpan s{};
        if (!(ls >> s.begin >> s.end)) fail("bad layer record");
        layers.push_back(s);
      } else {
        fail("unknown record type '" + tag + "'");
      }
    }
    offset += static_cast<long long>(line_len);
  }
  if (n < 0) fail("empty problem file");
  return IsingProblem(n, std::move(couplings), std::move(biases), std::move(frozen),
                      std::move(layers));
}

void save_problem_file(const IsingProblem& problem, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  save_problem(problem, f);
}

IsingProblem load_problem_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  return load_problem(f);
}

}  // namespace spinnet
