#pragma once

#include <string>

#include "spinnet/deep.hpp"
#include "spinnet/network.hpp"

namespace spinnet {

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const NetworkParams& params, const std::string& path,
                     const std::string& config_hash);
NetworkParams load_checkpoint(const std::string& path, std::string* config_hash = nullptr);

void save_deep_checkpoint(const DeepNetworkParams& params, const std::string& path,
                          const std::string& config_hash);
DeepNetworkParams load_deep_checkpoint(const std::string& path,
                                       std::string* config_hash = nullptr);

// "network", "deep" or FormatError
std::string checkpoint_kind(const std::string& path);

}  // namespace spinnet
