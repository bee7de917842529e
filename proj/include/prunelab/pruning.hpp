#ifndef PRUNELAB_PRUNING_HPP
#define PRUNELAB_PRUNING_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prunelab/nn.hpp"

namespace prunelab {

enum class PruneMethodKind { Magnitude, Gradient, Undecayed, Random };

// Scoring rule selector. Undecayed carries its decay coefficient, Random its
// score stream seed.
struct PruneMethod {
  PruneMethodKind kind = PruneMethodKind::Magnitude;
  double epsilon = 0.0;   // Undecayed only
  std::uint64_t seed = 0; // Random only

  static PruneMethod magnitude() { return {PruneMethodKind::Magnitude, 0.0, 0}; }
  static PruneMethod gradient() { return {PruneMethodKind::Gradient, 0.0, 0}; }
  static PruneMethod undecayed(double epsilon);
  static PruneMethod random(std::uint64_t seed) { return {PruneMethodKind::Random, 0.0, seed}; }

  bool needs_gradients() const {
    return kind == PruneMethodKind::Gradient || kind == PruneMethodKind::Undecayed;
  }
  std::string name() const;  // "MP" / "GP" / "UP" / "RP"
  static PruneMethodKind parse_kind(const std::string& name);
};

// Per-weight scores; already-masked positions are ineligible. Lower scores
// are pruned first.
struct ScoreSet {
  std::vector<Tensor> scores;                    // parallel to model.params
  std::vector<std::vector<std::uint8_t>> eligible;
  std::size_t eligible_count = 0;
  std::uint64_t mask_fingerprint = 0;  // of the model that was scored
};

// Global prune selection for a target pruning ratio t: keep round(N/t)
// weights, prune the rest, smallest scores first, ties to the lowest flat
// (layer-major) index.
struct PrunePlan {
  double ratio = 0.0;
  std::size_t eligible_before = 0;
  std::size_t keep_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> prune;  // (layer, offset), sorted
  std::uint64_t mask_fingerprint = 0;
};

// MP: |theta|. GP: |-theta * grad|. UP: |-theta * grad + eps * theta^2|.
// RP: uniform(0,1) from a stream keyed (method.seed, "rp"). GP/UP require
// grads from full_gradient on the training split with the matching epsilon.
ScoreSet score(const Model& model, const PruneMethod& method, const GradientSet* grads);

PrunePlan plan(const ScoreSet& scores, double t);

// Zeroes the planned weights and clears their masks. The plan must have been
// built from the model's current masks. Returns the achieved ratio
// (eligible-before / kept).
double apply(Model& model, const PrunePlan& p);

// One-shot pipeline: (GP/UP) training-split gradient -> score -> plan ->
// apply -> fine-tune with masks held. GP uses ft_cfg.weight_decay for the
// gradient; UP uses its own epsilon.
Model prune_and_finetune(const Model& model, const PruneMethod& method, double t,
                         const Dataset& ds, const TrainConfig& ft_cfg);

// Audit export: layer, flat_index, score, pruned.
void export_plan_csv(const PrunePlan& p, const ScoreSet& scores,
                     const std::filesystem::path& path);

}  // namespace prunelab

#endif
