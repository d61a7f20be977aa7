#include "spinnet/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spinnet {

namespace {

void write_row(std::ostream& out, const double* v, int n) {
  char buf[64];
  for (int k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k]);
    out << buf << (k + 1 == n ? "" : " ");
  }
  out << "\n";
}

void read_row(std::istream& in, double* v, int n, const std::string& what) {
  for (int k = 0; k < n; ++k)
    if (!(in >> v[k])) throw FormatError("corrupt checkpoint: truncated " + what);
}

int check_header(std::istream& in, const std::string& magic) {
  std::string word;
  if (!(in >> word) || word != magic) throw FormatError("not a " + magic + " container");
  std::string vtag;
  if (!(in >> vtag) || vtag.size() < 2 || vtag[0] != 'v')
    throw FormatError("corrupt checkpoint: missing version tag");
  int version = 0;
  try {
    version = std::stoi(vtag.substr(1));
  } catch (const std::exception&) {
    throw FormatError("corrupt checkpoint: bad version tag " + vtag);
  }
  if (version > kCheckpointVersion)
    throw VersionError("checkpoint version v" + std::to_string(version) +
                       " is newer than supported v" + std::to_string(kCheckpointVersion));
  if (version < kCheckpointVersion)
    std::cerr << "note: reading v" << version << " checkpoint with the v" << kCheckpointVersion
              << " reader\n";
  return version;
}

std::string read_hash(std::istream& in) {
  std::string tag, hash;
  if (!(in >> tag >> hash) || tag != "config_hash")
    throw FormatError("corrupt checkpoint: missing config_hash");
  return hash;
}

void expect(std::istream& in, const std::string& token) {
  std::string word;
  if (!(in >> word) || word != token)
    throw FormatError("corrupt checkpoint: expected '" + token + "'");
}

}  // namespace

void save_checkpoint(const NetworkParams& params, const std::string& path,
                     const std::string& config_hash) {
  params.validate();
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << "spinnet-checkpoint v" << kCheckpointVersion << "\n";
  f << "config_hash " << (config_hash.empty() ? "-" : config_hash) << "\n";
  f << "dims " << params.n_input << " " << params.n_hidden << " " << params.n_output << " "
    << params.n_classes << " " << params.redundancy << "\n";
  f << "W\n";
  for (int i = 0; i < params.n_hidden; ++i)
    write_row(f, params.W.data() + static_cast<std::size_t>(i) * params.n_input, params.n_input);
  f << "J\n";
  for (int i = 0; i < params.n_hidden; ++i)
    write_row(f, params.J.data() + static_cast<std::size_t>(i) * params.n_output, params.n_output);
  f << "b_h\n";
  write_row(f, params.b_h.data(), params.n_hidden);
  f << "b_o\n";
  write_row(f, params.b_o.data(), params.n_output);
  f << "end\n";
}

NetworkParams load_checkpoint(const std::string& path, std::string* config_hash) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  check_header(f, "spinnet-checkpoint");
  std::string hash = read_hash(f);
  if (config_hash) *config_hash = hash;

  expect(f, "dims");
  int n_input, n_hidden, n_output, n_classes, redundancy;
  if (!(f >> n_input >> n_hidden >> n_output >> n_classes >> redundancy))
    throw FormatError("corrupt checkpoint: bad dims record");
  if (n_output != n_classes * redundancy)
    throw FormatError("corrupt checkpoint: inconsistent output dimensions");

  NetworkParams p = zero_params(n_input, n_hidden, n_classes, redundancy);
  expect(f, "W");
  read_row(f, p.W.data(), n_hidden * n_input, "W");
  expect(f, "J");
  read_row(f, p.J.data(), n_hidden * n_output, "J");
  expect(f, "b_h");
  read_row(f, p.b_h.data(), n_hidden, "b_h");
  expect(f, "b_o");
  read_row(f, p.b_o.data(), n_output, "b_o");
  expect(f, "end");
  p.validate();
  return p;
}

void save_deep_checkpoint(const DeepNetworkParams& params, const std::string& path,
                          const std::string& config_hash) {
  params.validate();
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << "spinnet-deep-checkpoint v" << kCheckpointVersion << "\n";
  f << "config_hash " << (config_hash.empty() ? "-" : config_hash) << "\n";
  f << "dims " << params.n_input << " " << params.n_classes << " " << params.redundancy << "\n";
  f << "layers " << params.n_layers();
  for (int s : params.layer_sizes) f << " " << s;
  f << "\n";
  f << "W\n";
  for (int i = 0; i < params.layer_sizes[0]; ++i)
    write_row(f, params.W.data() + static_cast<std::size_t>(i) * params.n_input, params.n_input);
  for (int l = 0; l + 1 < params.n_layers(); ++l) {
    f << "J " << l << "\n";
    const int rows = params.layer_sizes[static_cast<std::size_t>(l)];
    const int cols = params.layer_sizes[static_cast<std::size_t>(l) + 1];
    for (int i = 0; i < rows; ++i)
      write_row(f, params.J[static_cast<std::size_t>(l)].data() + static_cast<std::size_t>(i) * cols,
                cols);
  }
  for (int l = 0; l < params.n_layers(); ++l) {
    f << "b " << l << "\n";
    write_row(f, params.b[static_cast<std::size_t>(l)].data(),
              params.layer_sizes[static_cast<std::size_t>(l)]);
  }
  f << "end\n";
}

DeepNetworkParams load_deep_checkpoint(const std::string& path, std::string* config_hash) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  check_header(f, "spinnet-deep-checkpoint");
  std::string hash = read_hash(f);
  if (config_hash) *config_hash = hash;

  expect(f, "dims");
  DeepNetworkParams p;
  if (!(f >> p.n_input >> p.n_classes >> p.redundancy))
    throw FormatError("corrupt checkpoint: bad dims record");
  expect(f, "layers");
  int L;
  if (!(f >> L) || L < 2) throw FormatError("corrupt checkpoint: bad layer count");
  p.layer_sizes.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l)
    if (!(f >> p.layer_sizes[static_cast<std::size_t>(l)]))
      throw FormatError("corrupt checkpoint: truncated layer sizes");

  p.W.resize(static_cast<std::size_t>(p.layer_sizes[0]) * p.n_input);
  expect(f, "W");
  read_row(f, p.W.data(), static_cast<int>(p.W.size()), "W");
  for (int l = 0; l + 1 < L; ++l) {
    expect(f, "J");
    int got;
    if (!(f >> got) || got != l) throw FormatError("corrupt checkpoint: J layer index mismatch");
    std::vector<double> j(static_cast<std::size_t>(p.layer_sizes[static_cast<std::size_t>(l)]) *
                          p.layer_sizes[static_cast<std::size_t>(l) + 1]);
    read_row(f, j.data(), static_cast<int>(j.size()), "J");
    p.J.push_back(std::move(j));
  }
  for (int l = 0; l < L; ++l) {
    expect(f, "b");
    int got;
    if (!(f >> got) || got != l) throw FormatError("corrupt checkpoint: b layer index mismatch");
    std::vector<double> b(static_cast<std::size_t>(p.layer_sizes[static_cast<std::size_t>(l)]));
    read_row(f, b.data(), static_cast<int>(b.size()), "b");
    p.b.push_back(std::move(b));
  }
  expect(f, "end");
  p.validate();
  return p;
}

std::string checkpoint_kind(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  std::string word;
  if (!(f >> word)) throw FormatError("empty checkpoint file: " + path);
  if (word == "spinnet-checkpoint") return "network";
  if (word == "spinnet-deep-checkpoint") return "deep";
  throw FormatError("not a checkpoint container: " + path);
}

}  // namespace spinnet
