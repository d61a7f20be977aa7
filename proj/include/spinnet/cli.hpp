#pragma once

#include <string>
#include <vector>

namespace spinnet {

// Entry point behind the spinnet binary; returns the process exit status
// (0 success, 1 runtime error, 2 usage error).
int cli_dispatch(std::vector<std::string> args);

}  // namespace spinnet
