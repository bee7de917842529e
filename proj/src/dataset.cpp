#include "prunelab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"
#include "prunelab/tensor.hpp"

namespace prunelab {

std::size_t Dataset::sample_dim() const {
  return Tensor::element_count(input_shape);
}

const std::vector<std::size_t>& Dataset::split_indices(Split s) const {
  switch (s) {
    case Split::Train: return train_idx;
    case Split::Validation: return val_idx;
    case Split::Test: return test_idx;
  }
  throw UsageError("unknown split");
}

std::vector<std::size_t> Dataset::class_counts(std::span<const std::size_t> idx) const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t i : idx) ++counts[static_cast<std::size_t>(labels[i])];
  return counts;
}

void Dataset::update_balanced_flag() {
  const auto counts = class_counts(test_idx);
  balanced_test = !test_idx.empty() &&
                  std::all_of(counts.begin(), counts.end(),
                              [&](std::size_t c) { return c == counts[0]; });
}

void Dataset::carve_validation(double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("validation fraction must be in (0, 1)");
  train_idx.insert(train_idx.end(), val_idx.begin(), val_idx.end());
  val_idx.clear();
  std::sort(train_idx.begin(), train_idx.end());
  auto rng = make_stream(seed, "val-split");
  fisher_yates(train_idx, rng);
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(train_idx.size()) + 0.5));
  n_val = std::clamp<std::size_t>(n_val, 1, train_idx.size() - 1);
  val_idx.assign(train_idx.end() - static_cast<std::ptrdiff_t>(n_val), train_idx.end());
  train_idx.resize(train_idx.size() - n_val);
}

void Dataset::force_balance_test() {
  const auto counts = class_counts(test_idx);
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (std::size_t c : counts) min_count = std::min(min_count, c);
  if (min_count == 0) throw InputError("test split is missing a class entirely");
  std::vector<std::size_t> kept;
  std::vector<std::size_t> taken(num_classes, 0);
  for (std::size_t i : test_idx) {
    auto& t = taken[static_cast<std::size_t>(labels[i])];
    if (t < min_count) {
      kept.push_back(i);
      ++t;
    }
  }
  test_idx = std::move(kept);
  update_balanced_flag();
}

void Dataset::validate() const {
  if (num_classes < 2) throw InputError("dataset needs at least 2 classes");
  if (labels.empty()) throw InputError("dataset is empty");
  if (features.size() != labels.size() * sample_dim())
    throw ShapeError("feature buffer does not match sample count x dim");
  for (int label : labels)
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
      throw InputError("label outside [0, classes)");
  std::unordered_set<std::size_t> seen;
  for (const auto* idx : {&train_idx, &val_idx, &test_idx})
    for (std::size_t i : *idx) {
      if (i >= labels.size()) throw InputError("split index out of range");
      if (!seen.insert(i).second) throw InputError("splits overlap");
    }
}

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices) {
  Batch b;
  b.count = indices.size();
  b.dim = ds.sample_dim();
  b.x.resize(b.count * b.dim);
  b.y.resize(b.count);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    const float* src = ds.features.data() + indices[s] * b.dim;
    double* dst = b.x.data() + s * b.dim;
    for (std::size_t i = 0; i < b.dim; ++i) dst[i] = static_cast<double>(src[i]);
    b.y[s] = ds.labels[indices[s]];
  }
  return b;
}

}  // namespace prunelab
