#include "spinnet/dataset.hpp"

#include <fstream>

#include "spinnet/hash.hpp"
#include "spinnet/rng.hpp"

namespace spinnet {

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
  for (const auto& img : images)
    if (img.label >= 0 && img.label < n_classes) ++counts[static_cast<std::size_t>(img.label)];
  return counts;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, long long offset) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in)
    throw FormatError(path + ": truncated at byte " + std::to_string(offset));
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

}  // namespace

Dataset load_mnist(const std::string& idx_image_path, const std::string& idx_label_path) {
  std::ifstream imgs(idx_image_path, std::ios::binary);
  if (!imgs) throw FormatError("cannot open: " + idx_image_path);
  std::uint32_t magic = read_be32(imgs, idx_image_path, 0);
  if (magic != 0x00000803u)
    throw FormatError(idx_image_path + ": bad image magic at byte 0 (got " +
                      std::to_string(magic) + ", want 2051)");
  std::uint32_t n = read_be32(imgs, idx_image_path, 4);
  std::uint32_t rows = read_be32(imgs, idx_image_path, 8);
  std::uint32_t cols = read_be32(imgs, idx_image_path, 12);
  const std::size_t n_pix = static_cast<std::size_t>(rows) * cols;

  std::ifstream labs(idx_label_path, std::ios::binary);
  if (!labs) throw FormatError("cannot open: " + idx_label_path);
  std::uint32_t lmagic = read_be32(labs, idx_label_path, 0);
  if (lmagic != 0x00000801u)
    throw FormatError(idx_label_path + ": bad label magic at byte 0 (got " +
                      std::to_string(lmagic) + ", want 2049)");
  std::uint32_t ln = read_be32(labs, idx_label_path, 4);
  if (ln != n)
    throw FormatError(idx_label_path + ": label count " + std::to_string(ln) +
                      " does not match image count " + std::to_string(n));

  Dataset ds;
  ds.split = "full";
  ds.n_classes = 10;
  ds.n_pixels = static_cast<int>(n_pix);
  ds.images.resize(n);
  std::vector<std::uint8_t> buf(n_pix);
  for (std::uint32_t k = 0; k < n; ++k) {
    imgs.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n_pix));
    if (!imgs)
      throw FormatError(idx_image_path + ": truncated image data at byte " +
                        std::to_string(16 + static_cast<long long>(k) * n_pix));
    auto& img = ds.images[k];
    img.pixels.resize(n_pix);
    for (std::size_t p = 0; p < n_pix; ++p) img.pixels[p] = buf[p] / 255.0;
    char lb;
    labs.read(&lb, 1);
    if (!labs)
      throw FormatError(idx_label_path + ": truncated label data at byte " +
                        std::to_string(8 + static_cast<long long>(k)));
    auto label = static_cast<std::uint8_t>(lb);
    if (label > 9)
      throw FormatError(idx_label_path + ": label " + std::to_string(label) +
                        " out of range at byte " + std::to_string(8 + static_cast<long long>(k)));
    img.label = label;
  }

  std::uint64_t h = fnv1a(idx_image_path);
  h = fnv1a(idx_label_path, h);
  h = fnv1a(std::to_string(n) + "x" + std::to_string(n_pix), h);
  ds.provenance_hash = hex16(h);
  return ds;
}

void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      int rows, int cols) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open for writing: " + path);
  auto be32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(b), 4);
  };
  be32(0x00000803u);
  be32(static_cast<std::uint32_t>(images.size()));
  be32(static_cast<std::uint32_t>(rows));
  be32(static_cast<std::uint32_t>(cols));
  for (const auto& img : images)
    f.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open for writing: " + path);
  auto be32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(b), 4);
  };
  be32(0x00000801u);
  be32(static_cast<std::uint32_t>(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()),
          static_cast<std::streamsize>(labels.size()));
}

Dataset make_subset(const Dataset& source, int per_class, std::uint64_t seed, int skip_per_class) {
  if (per_class < 1) throw ContractError("per_class must be >= 1");
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(source.n_classes));
  for (int k = 0; k < source.size(); ++k) {
    int y = source.images[static_cast<std::size_t>(k)].label;
    if (y < 0 || y >= source.n_classes) throw ContractError("unlabeled image in source dataset");
    by_class[static_cast<std::size_t>(y)].push_back(k);
  }

  Dataset out;
  out.split = skip_per_class == 0 ? "train" : "test";
  out.n_classes = source.n_classes;
  out.n_pixels = source.n_pixels;
  std::vector<int> picked;
  for (int c = 0; c < source.n_classes; ++c) {
    auto& pool = by_class[static_cast<std::size_t>(c)];
    if (static_cast<int>(pool.size()) < skip_per_class + per_class)
      throw ContractError("not enough images of class " + std::to_string(c) + " (" +
                          std::to_string(pool.size()) + " available, " +
                          std::to_string(skip_per_class + per_class) + " needed)");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(pool);
    for (int t = skip_per_class; t < skip_per_class + per_class; ++t)
      picked.push_back(pool[static_cast<std::size_t>(t)]);
  }
  // interleave classes in a seeded order so one epoch is not class-sorted
  Rng order_rng(derive_seed(seed, 0x5eedULL));
  order_rng.shuffle(picked);
  for (int k : picked) out.images.push_back(source.images[static_cast<std::size_t>(k)]);

  std::uint64_t h = fnv1a(source.provenance_hash);
  h = fnv1a("subset:" + std::to_string(per_class) + ":" + std::to_string(seed) + ":" +
                std::to_string(skip_per_class),
            h);
  out.provenance_hash = hex16(h);
  return out;
}

Dataset synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.n_classes < 2 || spec.side < 2 || spec.pool_per_class < 1)
    throw ConfigError("bad synthetic dataset spec");
  const int n_pix = spec.side * spec.side;
  if (spec.stroke < 0 || spec.stroke > n_pix) throw ConfigError("bad synthetic stroke count");
  Rng proto_rng(derive_seed(spec.seed, 17));
  std::vector<std::vector<std::int8_t>> prototypes(static_cast<std::size_t>(spec.n_classes));
  if (spec.stroke == 0) {
    for (auto& p : prototypes) {
      p.resize(static_cast<std::size_t>(n_pix));
      for (auto& bit : p) bit = proto_rng.coin() ? 1 : 0;
    }
  } else {
    std::vector<std::int8_t> base(static_cast<std::size_t>(n_pix));
    for (auto& bit : base) bit = proto_rng.coin() ? 1 : 0;
    for (auto& p : prototypes) {
      p = base;
      for (int s = 0; s < spec.stroke; ++s) {
        std::size_t pos = static_cast<std::size_t>(proto_rng.below(static_cast<std::uint64_t>(n_pix)));
        p[pos] ^= 1;
      }
    }
  }

  Dataset ds;
  ds.split = "pool";
  ds.n_classes = spec.n_classes;
  ds.n_pixels = n_pix;
  for (int c = 0; c < spec.n_classes; ++c) {
    Rng rng(derive_seed(spec.seed, 0x1000ULL + static_cast<std::uint64_t>(c)));
    for (int k = 0; k < spec.pool_per_class; ++k) {
      InputImage img;
      img.label = c;
      img.pixels.resize(static_cast<std::size_t>(n_pix));
      // difficulty ramp: image k flips pixels with probability up to `noise`,
      // so every class spans clean through heavily corrupted examples
      double flip = spec.pool_per_class > 1
                        ? spec.noise * k / static_cast<double>(spec.pool_per_class - 1)
                        : spec.noise;
      for (int p = 0; p < n_pix; ++p) {
        int bit = prototypes[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
        if (rng.uniform() < flip) bit ^= 1;
        img.pixels[static_cast<std::size_t>(p)] = bit;
      }
      ds.images.push_back(std::move(img));
    }
  }

  std::uint64_t h = fnv1a("synthetic");
  h = fnv1a(std::to_string(spec.n_classes) + ":" + std::to_string(spec.side) + ":" +
                std::to_string(spec.pool_per_class) + ":" + std::to_string(spec.noise) + ":" +
                std::to_string(spec.stroke) + ":" + std::to_string(spec.seed),
            h);
  ds.provenance_hash = hex16(h);
  return ds;
}

}  // namespace spinnet
