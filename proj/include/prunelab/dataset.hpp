#ifndef PRUNELAB_DATASET_HPP
#define PRUNELAB_DATASET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace prunelab {

enum class Split { Train, Validation, Test };

// Labeled sample collection with index-based splits. Features are stored as
// float32 (exactly representable pixel/synthetic values); all arithmetic on
// them happens in double downstream.
struct Dataset {
  std::string name;
  std::vector<std::size_t> input_shape;
  std::size_t num_classes = 0;
  std::vector<float> features;  // size() == sample_count * sample_dim
  std::vector<int> labels;
  std::vector<std::size_t> train_idx, val_idx, test_idx;
  bool balanced_test = false;  // test split has equal per-class counts

  std::size_t sample_dim() const;
  std::size_t sample_count() const { return labels.size(); }
  const std::vector<std::size_t>& split_indices(Split s) const;

  std::vector<std::size_t> class_counts(std::span<const std::size_t> idx) const;
  void update_balanced_flag();

  // Moves the last `fraction` of the shuffled training indices into the
  // validation split (shuffle keyed by (seed, "val-split")). Any existing
  // validation indices are folded back into train first.
  void carve_validation(double fraction, std::uint64_t seed);

  // Trims the test split so every class has the minimum per-class count,
  // keeping earliest samples. Makes balanced_test true.
  void force_balance_test();

  // Throws InputError/ShapeError on inconsistencies (labels out of range,
  // overlapping splits, feature size mismatch).
  void validate() const;
};

// Materialized mini-batch: row-major doubles plus labels.
struct Batch {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> y;
};

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices);

}  // namespace prunelab

#endif
