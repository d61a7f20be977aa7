#include "spinnet/config.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "spinnet/hash.hpp"

namespace spinnet {

namespace {

constexpr std::array kKnownKeys = {
    "method",        "epochs",          "m",
    "seed",          "dataset",         "out",
    "synthetic.classes", "synthetic.side", "synthetic.pool_per_class",
    "synthetic.noise",   "synthetic.seed",
    "idx.train_images",  "idx.train_labels", "idx.test_images", "idx.test_labels",
    "subset.train_per_class", "subset.test_per_class", "subset.seed",
    "net.hidden",    "net.redundancy",
    "rates.w",       "rates.j",         "rates.h",       "rates.o",
    "sampler.sweeps", "sampler.beta0",  "sampler.beta1", "sampler.beta_steps",
    "sampler.restarts", "sampler.cycle_depth", "sampler.n_cycles",
    "nudge_strength", "fallback_threshold",
    "parallel",      "record_wall_time",
    "backprop.lr",   "backprop.batch",
    "deep.layers",   "deep.m",
};

bool known_key(const std::string& key) {
  for (const char* k : kKnownKeys)
    if (key == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!known_key(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (cfg.values_.count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_string(buf.str());
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: " + it->second);
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + it->second);
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + it->second);
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : values_) h = fnv1a(k + "=" + v + "\n", h);
  return hex16(h);
}

}  // namespace spinnet
