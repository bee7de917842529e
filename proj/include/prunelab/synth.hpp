#ifndef PRUNELAB_SYNTH_HPP
#define PRUNELAB_SYNTH_HPP

#include <cstdint>

#include "prunelab/dataset.hpp"

namespace prunelab {

// Balanced synthetic classification task: unit-variance isotropic Gaussian
// clusters centered on scaled simplex vertices with pairwise center distance
// `separation`. Every split has equal per-class counts (train: per_class,
// validation: per_class / 5, test: per_class). Deterministic per seed.
// Requires classes >= 2, per_class >= 10, dim >= classes.
Dataset synth_balanced(std::size_t classes, std::size_t per_class, std::size_t dim,
                       double separation, std::uint64_t seed);

}  // namespace prunelab

#endif
