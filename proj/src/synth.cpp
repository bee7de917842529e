#include "prunelab/synth.hpp"

#include <cmath>

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

Dataset synth_balanced(std::size_t classes, std::size_t per_class, std::size_t dim,
                       double separation, std::uint64_t seed) {
  if (classes < 2) throw ConfigError("synthetic dataset needs at least 2 classes");
  if (per_class < 10) throw ConfigError("synthetic dataset needs per_class >= 10");
  if (dim < classes)
    throw ConfigError("synthetic dataset needs dim >= classes for simplex centers");
  if (!(separation >= 0.0)) throw ConfigError("separation must be >= 0");

  // Scaled basis vectors have pairwise distance scale * sqrt(2); centering on
  // the centroid keeps the cloud near the origin without changing distances.
  const double scale = separation / std::sqrt(2.0);
  const double centroid = scale / static_cast<double>(classes);
  std::vector<double> centers(classes * dim, -centroid);
  for (std::size_t c = 0; c < classes; ++c) centers[c * dim + c] += scale;

  Dataset ds;
  ds.name = "synthetic";
  ds.input_shape = {dim};
  ds.num_classes = classes;

  const std::size_t val_per_class = per_class / 5;
  const std::size_t split_sizes[3] = {per_class, val_per_class, per_class};
  std::vector<std::size_t>* splits[3] = {&ds.train_idx, &ds.val_idx, &ds.test_idx};
  for (std::size_t split = 0; split < 3; ++split) {
    for (std::size_t c = 0; c < classes; ++c) {
      auto rng = make_stream(seed, "synth", {split, c});
      for (std::size_t s = 0; s < split_sizes[split]; ++s) {
        splits[split]->push_back(ds.labels.size());
        ds.labels.push_back(static_cast<int>(c));
        for (std::size_t d = 0; d < dim; ++d)
          ds.features.push_back(
              static_cast<float>(centers[c * dim + d] + rng.next_normal()));
      }
    }
  }
  ds.update_balanced_flag();
  ds.validate();
  return ds;
}

}  // namespace prunelab
