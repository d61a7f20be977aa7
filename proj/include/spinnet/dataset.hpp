#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinnet/network.hpp"

namespace spinnet {

struct Dataset {
  std::vector<InputImage> images;  // all labeled
  std::string split;               // "train", "test", "pool", ...
  int n_classes = 0;
  int n_pixels = 0;
  std::string provenance_hash;  // hex of source + subset parameters

  int size() const { return static_cast<int>(images.size()); }
  std::vector<int> class_counts() const;
};

// IDX (big-endian) readers; pixels scaled to [0,1] by /255.
Dataset load_mnist(const std::string& idx_image_path, const std::string& idx_label_path);

// IDX writers, used by tests and the dataset export tool.
void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

// Seeded selection of exactly per_class images per class, order shuffled.
// skip_per_class skips that many picks of the same seeded per-class order,
// so train/test subsets drawn from one seed are disjoint.
Dataset make_subset(const Dataset& source, int per_class, std::uint64_t seed,
                    int skip_per_class = 0);

struct SyntheticSpec {
  int n_classes = 10;
  int side = 8;               // images are side x side
  int pool_per_class = 200;   // images generated per class
  double noise = 0.1;         // per-pixel flip probability, ramped over the pool
  int stroke = 0;             // 0: independent prototypes; >0: shared base
                              // pattern with `stroke` class-specific flips
  std::uint64_t seed = 1;
};

// Binary class prototypes plus per-pixel flip noise. The noise ramps from 0
// to `noise` across each class pool, so examples span clean to corrupted.
// stroke > 0 makes classes share a base pattern and differ only in sparse
// strokes, which keeps them mutually confusable.
Dataset synthetic_dataset(const SyntheticSpec& spec);

}  // namespace spinnet
