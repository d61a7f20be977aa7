#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "spinnet/errors.hpp"

namespace spinnet {

// Flat key=value run configuration: '#' comments, typed access, unknown keys
// rejected against the schema in config.cpp. The hash of the canonicalized
// document is embedded in every emitted artifact.
class RunConfig {
 public:
  static RunConfig from_string(const std::string& text);
  static RunConfig from_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // fnv-1a of the sorted canonical "key=value" lines
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace spinnet
