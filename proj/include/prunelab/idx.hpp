#ifndef PRUNELAB_IDX_HPP
#define PRUNELAB_IDX_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "prunelab/dataset.hpp"

namespace prunelab {

// One parsed IDX file: big-endian magic, big-endian u32 dimension sizes,
// unsigned-byte payload. Transparently inflates gzip-compressed files.
struct IdxArray {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> data;
};

IdxArray read_idx(const std::filesystem::path& path);

struct IdxPaths {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

struct IdxOptions {
  std::string name = "idx";
  // Trim the test split to equal per-class counts (keeps earliest samples).
  bool force_balance = true;
};

// Builds a dataset from IDX image/label pairs. Pixels are scaled to [0, 1];
// the validation split stays empty until carve_validation() is called with a
// run seed. Images must have 3 dims (count, rows, cols); labels 1 dim.
Dataset load_idx(const IdxPaths& paths, const IdxOptions& opts = {});

}  // namespace prunelab

#endif
