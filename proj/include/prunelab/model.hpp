#ifndef PRUNELAB_MODEL_HPP
#define PRUNELAB_MODEL_HPP

#include <cstdint>
#include <vector>

#include "prunelab/arch.hpp"
#include "prunelab/tensor.hpp"

namespace prunelab {

// Parameters of one layer. Non-parameterized layers keep empty tensors.
// mask has one byte per weight; a 0 entry pins that weight to exactly zero.
// Biases are never masked and never weight-decayed.
struct LayerParams {
  Tensor weights;
  std::vector<double> bias;
  std::vector<std::uint8_t> mask;

  bool empty() const { return weights.empty(); }
};

struct Model {
  ArchitectureSpec arch;
  std::vector<LayerParams> params;  // parallel to arch.layers

  std::size_t weight_count() const;    // all weights, masked or not
  std::size_t unmasked_count() const;  // weights with mask == 1

  // Layer indices that carry parameters, in architecture order.
  std::vector<std::size_t> parameterized_layers() const;

  // Restores the invariant "masked weights are exactly zero".
  void zero_masked();

  // 64-bit fingerprint of the mask state; used to detect stale prune plans.
  std::uint64_t mask_fingerprint() const;
};

// Initializes weights uniformly in +-sqrt(6 / (fan_in + fan_out)) per tensor,
// biases to zero, all masks to 1. Deterministic given (spec, seed).
Model build_model(const ArchitectureSpec& spec, std::uint64_t seed);

}  // namespace prunelab

#endif
