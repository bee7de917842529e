#include "prunelab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "prunelab/error.hpp"
#include "prunelab/nn.hpp"

namespace prunelab {

std::uint64_t ConfusionMatrix::row_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes; ++j) s += at(c, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes; ++i) s += at(i, c);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes; ++i) s += at(i, i);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t v : counts) s += v;
  return s;
}

ConfusionMatrix confusion(const Model& model, const Dataset& ds, Split split) {
  const auto& idx = ds.split_indices(split);
  if (idx.empty()) throw InputError("empty split");
  const auto predictions = predict(model, ds, split);
  ConfusionMatrix cm(model.arch.num_classes);
  for (std::size_t s = 0; s < idx.size(); ++s)
    ++cm.at(static_cast<std::size_t>(ds.labels[idx[s]]),
            static_cast<std::size_t>(predictions[s]));
  return cm;
}

ClassBalanceProfile profile(const ConfusionMatrix& cm) {
  if (cm.classes < 2) throw InputError("confusion matrix needs at least 2 classes");
  const std::uint64_t total = cm.total();
  if (total == 0) throw InputError("confusion matrix is empty");
  const std::uint64_t correct = cm.trace();
  if (correct == 0)
    throw NumericError("degenerate model: accuracy is zero, normalized balance undefined");

  ClassBalanceProfile p;
  p.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  p.recall.resize(cm.classes);
  p.balance.resize(cm.classes);
  p.normalized_balance.resize(cm.classes);
  for (std::size_t c = 0; c < cm.classes; ++c) {
    const std::uint64_t row = cm.row_sum(c);
    if (row == 0) throw InputError("class " + std::to_string(c) + " has no samples");
    const std::uint64_t diag = cm.at(c, c);
    p.recall[c] = static_cast<double>(diag) / static_cast<double>(row);
    // B = R - A and B/A as single divisions of exact integer cross products.
    const double num = static_cast<double>(diag) * static_cast<double>(total) -
                       static_cast<double>(correct) * static_cast<double>(row);
    p.balance[c] = num / (static_cast<double>(row) * static_cast<double>(total));
    p.normalized_balance[c] = num / (static_cast<double>(row) * static_cast<double>(correct));
  }
  return p;
}

std::pair<double, double> precision_fscore(const ConfusionMatrix& cm, std::size_t c) {
  if (c >= cm.classes) throw UsageError("class index out of range");
  const std::uint64_t row = cm.row_sum(c);
  const std::uint64_t col = cm.col_sum(c);
  const std::uint64_t diag = cm.at(c, c);
  const double recall = row ? static_cast<double>(diag) / static_cast<double>(row) : 0.0;
  const double precision = col ? static_cast<double>(diag) / static_cast<double>(col) : 0.0;
  const double denom = recall + precision;
  const double f = denom > 0.0 ? 2.0 * recall * precision / denom : 0.0;
  return {precision, f};
}

std::optional<double> intensification(const ClassBalanceProfile& before,
                                      const ClassBalanceProfile& after, std::size_t c) {
  if (before.classes() != after.classes()) throw UsageError("profiles have different class sets");
  if (c >= before.classes()) throw UsageError("class index out of range");
  if (before.normalized_balance[c] == 0.0) return std::nullopt;
  return after.normalized_balance[c] / before.normalized_balance[c];
}

double alpha(const ClassBalanceProfile& before, const ClassBalanceProfile& after) {
  if (before.classes() != after.classes()) throw UsageError("profiles have different class sets");
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t c = 0; c < before.classes(); ++c) {
    const double x = before.normalized_balance[c];
    sxy += x * after.normalized_balance[c];
    sxx += x * x;
  }
  if (sxx == 0.0)
    throw NumericError("all pre-pruning normalized balances are zero; slope undefined");
  return sxy / sxx;
}

PooledAlpha alpha_pooled(
    std::span<const std::pair<ClassBalanceProfile, ClassBalanceProfile>> pairs) {
  if (pairs.empty()) throw UsageError("no profile pairs to pool");
  // Per-pair partial sums keep the slope exactly invariant under duplicated
  // pairs (the ratio of doubled sums is the same division).
  double sxy = 0.0, sxx = 0.0, syy = 0.0, acc = 0.0;
  std::size_t points = 0;
  for (const auto& [before, after] : pairs) {
    if (before.classes() != after.classes())
      throw UsageError("profiles have different class sets");
    double pxy = 0.0, pxx = 0.0, pyy = 0.0;
    for (std::size_t c = 0; c < before.classes(); ++c) {
      const double x = before.normalized_balance[c];
      const double y = after.normalized_balance[c];
      pxy += x * y;
      pxx += x * x;
      pyy += y * y;
      ++points;
    }
    sxy += pxy;
    sxx += pxx;
    syy += pyy;
    acc += after.accuracy;
  }
  if (sxx == 0.0) throw NumericError("pooled slope undefined: all x are zero");

  PooledAlpha out;
  out.alpha_hat = sxy / sxx;
  out.points = points;
  out.mean_accuracy = acc / static_cast<double>(pairs.size());
  double ss_res = 0.0;
  for (const auto& [before, after] : pairs)
    for (std::size_t c = 0; c < before.classes(); ++c) {
      const double r = after.normalized_balance[c] -
                       out.alpha_hat * before.normalized_balance[c];
      ss_res += r * r;
    }
  out.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return out;
}

double recall_variance(const ClassBalanceProfile& p) {
  if (p.classes() < 2) throw UsageError("recall variance needs at least 2 classes");
  const double n = static_cast<double>(p.classes());
  double mean = 0.0;
  for (double r : p.recall) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : p.recall) var += (r - mean) * (r - mean);
  return var / n;
}

void export_profile_csv(const ClassBalanceProfile& before, const ClassBalanceProfile& after,
                        const std::filesystem::path& path) {
  if (before.classes() != after.classes()) throw UsageError("profiles have different class sets");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class,recall,balance,normalized_balance,intensification_or_NA\n";
  char buf[32];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t c = 0; c < after.classes(); ++c) {
    const auto ratio = intensification(before, after, c);
    out << c << "," << fmt(after.recall[c]) << "," << fmt(after.balance[c]) << ","
        << fmt(after.normalized_balance[c]) << ","
        << (ratio ? fmt(*ratio) : std::string("NA")) << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace prunelab
