#include "prunelab/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

PruneMethod PruneMethod::undecayed(double epsilon) {
  if (!(epsilon >= 0.0)) throw ConfigError("undecayed pruning needs epsilon >= 0");
  return {PruneMethodKind::Undecayed, epsilon, 0};
}

std::string PruneMethod::name() const {
  switch (kind) {
    case PruneMethodKind::Magnitude: return "MP";
    case PruneMethodKind::Gradient: return "GP";
    case PruneMethodKind::Undecayed: return "UP";
    case PruneMethodKind::Random: return "RP";
  }
  return "?";
}

PruneMethodKind PruneMethod::parse_kind(const std::string& name) {
  if (name == "MP") return PruneMethodKind::Magnitude;
  if (name == "GP") return PruneMethodKind::Gradient;
  if (name == "UP") return PruneMethodKind::Undecayed;
  if (name == "RP") return PruneMethodKind::Random;
  throw ConfigError("unknown pruning method: '" + name + "' (expected MP, GP, UP, or RP)");
}

ScoreSet score(const Model& model, const PruneMethod& method, const GradientSet* grads) {
  if (method.needs_gradients() && grads == nullptr)
    throw UsageError(method.name() + " scoring requires gradients");
  if (grads && grads->weights.size() != model.params.size())
    throw ShapeError("gradient set does not match the model");

  ScoreSet out;
  out.scores.resize(model.params.size());
  out.eligible.resize(model.params.size());
  out.mask_fingerprint = model.mask_fingerprint();

  auto rp_rng = make_stream(method.seed, "rp");
  for (std::size_t li = 0; li < model.params.size(); ++li) {
    const auto& p = model.params[li];
    if (p.empty()) continue;
    out.scores[li] = Tensor(p.weights.shape());
    out.eligible[li] = p.mask;
    Tensor& s = out.scores[li];
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      if (!p.mask[i]) continue;
      ++out.eligible_count;
      const double theta = p.weights[i];
      switch (method.kind) {
        case PruneMethodKind::Magnitude:
          s[i] = std::abs(theta);
          break;
        case PruneMethodKind::Gradient: {
          const double g = grads->weights[li][i];
          if (!std::isfinite(g)) throw NumericError("non-finite gradient entry");
          s[i] = std::abs(-theta * g);
          break;
        }
        case PruneMethodKind::Undecayed: {
          const double g = grads->weights[li][i];
          if (!std::isfinite(g)) throw NumericError("non-finite gradient entry");
          s[i] = std::abs(-theta * g + method.epsilon * theta * theta);
          break;
        }
        case PruneMethodKind::Random:
          s[i] = rp_rng.next_unit();
          break;
      }
      if (!std::isfinite(s[i])) throw NumericError("non-finite prune score");
    }
  }
  return out;
}

PrunePlan plan(const ScoreSet& scores, double t) {
  if (!(t > 1.0)) throw ConfigError("pruning ratio must be > 1");
  const std::size_t n = scores.eligible_count;
  if (n == 0) throw ConfigError("no eligible weights to prune");
  const std::size_t keep = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) / t + 0.5));
  if (keep == 0) throw ConfigError("pruning ratio would remove every weight");

  PrunePlan out;
  out.ratio = t;
  out.eligible_before = n;
  out.keep_count = keep;
  out.mask_fingerprint = scores.mask_fingerprint;
  if (keep >= n) return out;  // nothing to prune at this ratio

  // (score, layer, offset) over the eligible set; ascending score, then flat
  // index (layer-major) for deterministic ties.
  std::vector<std::tuple<double, std::size_t, std::size_t>> ranked;
  ranked.reserve(n);
  for (std::size_t li = 0; li < scores.scores.size(); ++li) {
    const Tensor& s = scores.scores[li];
    for (std::size_t i = 0; i < s.size(); ++i)
      if (scores.eligible[li][i]) ranked.emplace_back(s[i], li, i);
  }
  const std::size_t n_prune = n - keep;
  std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n_prune),
                   ranked.end());
  ranked.resize(n_prune);
  std::sort(ranked.begin(), ranked.end());
  out.prune.reserve(n_prune);
  for (const auto& [s, li, i] : ranked) out.prune.emplace_back(li, i);
  std::sort(out.prune.begin(), out.prune.end());
  return out;
}

double apply(Model& model, const PrunePlan& p) {
  if (model.mask_fingerprint() != p.mask_fingerprint)
    throw UsageError("stale prune plan: model masks changed since scoring");
  for (const auto& [li, i] : p.prune) {
    if (li >= model.params.size() || i >= model.params[li].weights.size())
      throw UsageError("prune plan index out of range");
    if (!model.params[li].mask[i]) throw UsageError("prune plan hits an already-masked weight");
    model.params[li].weights[i] = 0.0;
    model.params[li].mask[i] = 0;
  }
  return static_cast<double>(p.eligible_before) / static_cast<double>(p.keep_count);
}

Model prune_and_finetune(const Model& model, const PruneMethod& method, double t,
                         const Dataset& ds, const TrainConfig& ft_cfg) {
  GradientSet grads;
  const GradientSet* grads_ptr = nullptr;
  if (method.needs_gradients()) {
    const double eps = method.kind == PruneMethodKind::Undecayed ? method.epsilon
                                                                 : ft_cfg.weight_decay;
    grads = full_gradient(model, ds, Split::Train, eps);
    grads_ptr = &grads;
  }
  const ScoreSet scores = score(model, method, grads_ptr);
  const PrunePlan p = plan(scores, t);
  Model pruned = model;
  apply(pruned, p);
  return train(pruned, ds, ft_cfg).model;
}

void export_plan_csv(const PrunePlan& p, const ScoreSet& scores,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "layer,flat_index,score,pruned\n";
  std::size_t cursor = 0;
  for (std::size_t li = 0; li < scores.scores.size(); ++li) {
    const Tensor& s = scores.scores[li];
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!scores.eligible[li][i]) continue;
      const bool pruned = cursor < p.prune.size() && p.prune[cursor] == std::make_pair(li, i);
      if (pruned) ++cursor;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", s[i]);
      out << li << "," << i << "," << buf << "," << (pruned ? 1 : 0) << "\n";
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace prunelab
