#pragma once

#include <string>

#include "spinnet/analysis.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

// CSV with "# config_hash=..." / "# dataset_hash=..." comment headers and
// columns epoch,train_error,test_error,wall_seconds,method,m,seed.
void write_run_csv(const std::string& path, const TrainRun& run);
TrainRun read_run_csv(const std::string& path);

void write_snapshot_csv(const std::string& path, const LandscapeSnapshot& snapshot,
                        const std::string& config_hash);

void write_compare_csv(const std::string& path, const CompareReport& report,
                       const std::string& config_hash);

}  // namespace spinnet
