#ifndef PRUNELAB_METRICS_HPP
#define PRUNELAB_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "prunelab/dataset.hpp"
#include "prunelab/model.hpp"

namespace prunelab {

// Per-class prediction counts from one evaluation pass. counts[c * classes +
// c'] is the number of samples of true class c predicted as c'.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes_)
      : classes(classes_), counts(classes_ * classes_, 0) {}

  std::uint64_t& at(std::size_t true_c, std::size_t pred_c) {
    return counts[true_c * classes + pred_c];
  }
  std::uint64_t at(std::size_t true_c, std::size_t pred_c) const {
    return counts[true_c * classes + pred_c];
  }
  std::uint64_t row_sum(std::size_t c) const;
  std::uint64_t col_sum(std::size_t c) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;
};

ConfusionMatrix confusion(const Model& model, const Dataset& ds, Split split);

// Accuracy, per-class recall, recall balance B^c = R^c - A, and normalized
// recall balance (R^c - A) / A. The balances are computed by integer
// cross-multiplication before a single division, so rational cases come out
// correctly rounded.
struct ClassBalanceProfile {
  double accuracy = 0.0;
  std::vector<double> recall;
  std::vector<double> balance;
  std::vector<double> normalized_balance;

  std::size_t classes() const { return recall.size(); }
};

ClassBalanceProfile profile(const ConfusionMatrix& cm);

// Precision (0 when the class is never predicted) and F-score (0 when
// R + P == 0) for one class.
std::pair<double, double> precision_fscore(const ConfusionMatrix& cm, std::size_t c);

// Intensification ratio for class c: normalized balance after / before.
// Undefined (nullopt) when the pre-pruning normalized balance is zero.
std::optional<double> intensification(const ClassBalanceProfile& before,
                                      const ClassBalanceProfile& after, std::size_t c);

// No-intercept least-squares slope of after vs before normalized balances:
// sum(x*y) / sum(x^2). Equals the (x^2)-weighted mean of the per-class
// intensification ratios.
double alpha(const ClassBalanceProfile& before, const ClassBalanceProfile& after);

// Single no-intercept regression over the union of class points of several
// (before, after) pairs, with the coefficient of determination measured
// against the no-intercept model and the mean post-pruning accuracy.
struct PooledAlpha {
  double alpha_hat = 0.0;
  double r2 = 0.0;
  double mean_accuracy = 0.0;
  std::size_t points = 0;
};

PooledAlpha alpha_pooled(
    std::span<const std::pair<ClassBalanceProfile, ClassBalanceProfile>> pairs);

// Population variance of the per-class recalls. Needs >= 2 classes.
double recall_variance(const ClassBalanceProfile& p);

// CSV export: class, recall, balance, normalized_balance,
// intensification_or_NA (rows describe `after`, ratios are after/before).
void export_profile_csv(const ClassBalanceProfile& before, const ClassBalanceProfile& after,
                        const std::filesystem::path& path);

}  // namespace prunelab

#endif
