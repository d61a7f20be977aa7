#pragma once

#include <stdexcept>
#include <string>

namespace spinnet {

// Length of a state or tensor does not match the owning object.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A call precondition other than a size mismatch was violated
// (frozen values out of sync, invalid class index, duplicate couplings, ...).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Problem too large for exact enumeration or dense simulation.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run or sampler configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the byte offset where parsing failed.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Container written by an incompatible (newer) format version.
struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few usable points for a fit or comparison.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State-vector integration lost normalization beyond tolerance.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spinnet
