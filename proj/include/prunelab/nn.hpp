#ifndef PRUNELAB_NN_HPP
#define PRUNELAB_NN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "prunelab/dataset.hpp"
#include "prunelab/model.hpp"

namespace prunelab {

// Gradient of the regularized loss, shape-congruent with the model's
// parameters. Entries at masked weight positions are zero.
struct GradientSet {
  std::vector<Tensor> weights;             // parallel to model.params
  std::vector<std::vector<double>> bias;
};

struct TrainConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 1;
  // Piecewise-constant learning rate: (start_epoch, rate), 1-based epochs,
  // strictly increasing, first entry at epoch 1.
  std::vector<std::pair<std::size_t, double>> schedule;
  double weight_decay = 0.0;  // epsilon; (eps/2)*sum(theta^2) joins the loss
  std::uint64_t seed = 0;

  void validate() const;
  double rate_for_epoch(std::size_t epoch) const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Model model;  // weights from the epoch with minimum validation loss
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 1-based
};

// Mean softmax cross-entropy over the batch plus (eps/2) * sum of squared
// unmasked weights (biases excluded from the decay term).
double loss(const Model& model, const Batch& batch, double eps);

// Reverse-mode gradient of loss(). Masked positions are zeroed.
GradientSet gradient(const Model& model, const Batch& batch, double eps);

// Gradient of the mean regularized loss over a whole split, accumulated in a
// fixed chunk order (sample-count-weighted mean of batch gradients).
GradientSet full_gradient(const Model& model, const Dataset& ds, Split split, double eps);

// theta <- theta - rate * grad for unmasked weights and all biases; masked
// weights stay exactly zero. rate must be > 0.
void sgd_step(Model& model, const GradientSet& grads, double rate);

// Mini-batch SGD with per-epoch shuffling keyed by (cfg.seed, "shuffle",
// epoch). Returns the weights of the epoch with the lowest validation loss
// (earliest epoch on ties) and the per-epoch history.
TrainResult train(const Model& model, const Dataset& ds, const TrainConfig& cfg);

// Argmax of the logits per sample; ties break to the lowest class index.
std::vector<int> predict(const Model& model, const double* x, std::size_t count);
std::vector<int> predict(const Model& model, const Dataset& ds, Split split);

GradientSet zero_gradients(const Model& model);

}  // namespace prunelab

#endif
