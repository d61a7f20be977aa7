#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spinnet/dataset.hpp"
#include "spinnet/network.hpp"
#include "spinnet/trainer.hpp"

namespace spinnet {

struct ScalingFit {
  double z = 0.0;           // -slope of ln(error) vs ln(epoch)
  double log_intercept = 0.0;
  double r_squared = 0.0;
  int first_epoch = 0;
  int last_epoch = 0;
  int points_used = 0;
  int zero_points_excluded = 0;
};

// Least-squares line on (ln epoch, ln error) over [from_epoch, to_epoch].
// Zero-error points are excluded and counted; fewer than 5 usable points is
// an InsufficientDataError.
ScalingFit fit_scaling(const std::vector<std::pair<int, double>>& curve, int from_epoch = 2,
                       int to_epoch = 1 << 30);

// Pairwise Hamming distances, parallel kernel plus a serial reference.
std::vector<double> hamming_matrix(const std::vector<SpinState>& states, bool parallel = true);
std::vector<double> hamming_matrix_serial(const std::vector<SpinState>& states);

struct MdsResult {
  std::vector<std::array<double, 2>> coords;
  double stress = 0.0;  // normalized: sum (d-delta)^2 / sum delta^2
  int iterations = 0;
};

// SMACOF stress majorization of the pairwise Hamming matrix into 2D.
// Deterministic per seed; stops after max_iter rounds or when the relative
// stress change drops below tol.
MdsResult mds_project(const std::vector<SpinState>& states, std::uint64_t seed = 0,
                      int max_iter = 300, double tol = 1e-6, bool parallel = true);

struct LandscapePoint {
  double x = 0.0;
  double y = 0.0;
  int decoded_class = -1;
  int image_id = 0;
};

struct LandscapeSnapshot {
  std::vector<LandscapePoint> points;
  double stress = 0.0;
  int epoch_tag = 0;
};

// samples_per_image low-energy states of H[x] per test image, decoded and
// projected together.
LandscapeSnapshot landscape_snapshot(const NetworkParams& params, const Dataset& test_set,
                                     int samples_per_image, const AnnealConfig& sampler,
                                     std::uint64_t seed, int epoch_tag = 0, bool parallel = true);

// mean inter-class / mean intra-class embedded distance; large when classes
// separate into distinct clusters
double cluster_separation(const LandscapeSnapshot& snapshot);

struct MethodSummary {
  std::string method;
  int m = 1;
  ScalingFit train_fit;
  ScalingFit test_fit;
  bool is_reference = false;  // externally supplied exponent, no fit
  double reference_z = 0.0;
};

struct CompareReport {
  std::vector<MethodSummary> methods;
  int reference_epoch = 100;
  // resource multiple: epochs method[j] needs to reach method[0]'s train
  // error at reference_epoch, divided by reference_epoch
  std::vector<double> resource_multiples;
  std::string text;
};

// Per-run scaling fits plus the cross-method resource estimate. Runs must
// share a dataset hash unless allow_mixed_datasets. `reference_rows` are
// label:z pairs echoed for side-by-side display.
CompareReport compare_runs(const std::vector<TrainRun>& runs,
                           const std::vector<std::pair<std::string, double>>& reference_rows = {},
                           int from_epoch = 2, int reference_epoch = 100,
                           bool allow_mixed_datasets = false);

std::string render_snapshot_svg(const LandscapeSnapshot& snapshot, int size_px = 640);

}  // namespace spinnet
