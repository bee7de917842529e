#ifndef PRUNELAB_MODEL_IO_HPP
#define PRUNELAB_MODEL_IO_HPP

#include <filesystem>

#include "prunelab/model.hpp"

namespace prunelab {

// Single-file model format, magic "PLAB1": architecture descriptor, then
// per-layer little-endian float64 weight/bias arrays, then per-layer mask
// bitmaps (LSB-first).
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace prunelab

#endif
