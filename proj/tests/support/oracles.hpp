// Test-only oracles, independent of the library's computation paths:
// finite differences for gradients, closed-form and series t CDFs, a
// root-finding least-squares fit, and random generators for models and
// confusion matrices.
#ifndef PRUNELAB_TESTS_ORACLES_HPP
#define PRUNELAB_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "prunelab/metrics.hpp"
#include "prunelab/nn.hpp"
#include "prunelab/rng.hpp"

namespace oracles {

// Central finite difference of loss() with respect to every unmasked weight
// and every bias. Step 1e-5.
struct FdGradient {
  std::vector<prunelab::Tensor> weights;
  std::vector<std::vector<double>> bias;
};

inline FdGradient fd_gradient(const prunelab::Model& model, const prunelab::Batch& batch,
                              double eps, double step = 1e-5) {
  FdGradient out;
  prunelab::Model work = model;
  out.weights.resize(model.params.size());
  out.bias.resize(model.params.size());
  for (std::size_t li = 0; li < model.params.size(); ++li) {
    if (model.params[li].empty()) continue;
    out.weights[li] = prunelab::Tensor(model.params[li].weights.shape());
    out.bias[li].assign(model.params[li].bias.size(), 0.0);
    for (std::size_t i = 0; i < model.params[li].weights.size(); ++i) {
      if (!model.params[li].mask[i]) continue;
      const double saved = work.params[li].weights[i];
      work.params[li].weights[i] = saved + step;
      const double up = prunelab::loss(work, batch, eps);
      work.params[li].weights[i] = saved - step;
      const double down = prunelab::loss(work, batch, eps);
      work.params[li].weights[i] = saved;
      out.weights[li][i] = (up - down) / (2.0 * step);
    }
    for (std::size_t i = 0; i < model.params[li].bias.size(); ++i) {
      const double saved = work.params[li].bias[i];
      work.params[li].bias[i] = saved + step;
      const double up = prunelab::loss(work, batch, eps);
      work.params[li].bias[i] = saved - step;
      const double down = prunelab::loss(work, batch, eps);
      work.params[li].bias[i] = saved;
      out.bias[li][i] = (up - down) / (2.0 * step);
    }
  }
  return out;
}

inline bool close_rel(double a, double b, double rel, double abs_floor) {
  const double diff = std::abs(a - b);
  return diff <= abs_floor || diff <= rel * std::max(std::abs(a), std::abs(b));
}

// Student-t CDF for integer df from the classic finite trigonometric sums
// (no beta function involved).
inline double t_cdf_closed_form(double t, int df) {
  const long double x = static_cast<long double>(t) / std::sqrt(static_cast<long double>(df));
  const long double theta = std::atan(x);
  const long double c = std::cos(theta), s = std::sin(theta);
  const long double pi = 3.14159265358979323846264338327950288L;
  if (df == 1) return static_cast<double>(0.5L + theta / pi);
  if (df % 2 == 1) {
    long double term = c;
    long double sum = c;
    for (int k = 3; k <= df - 2; k += 2) {
      term *= static_cast<long double>(k - 1) / k * c * c;
      sum += term;
    }
    return static_cast<double>(0.5L + (theta + s * sum) / pi);
  }
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 2; k <= df - 2; k += 2) {
    term *= static_cast<long double>(k - 1) / k * c * c;
    sum += term;
  }
  return static_cast<double>(0.5L + s * sum / 2.0L);
}

// Regularized incomplete beta via the hypergeometric power series in long
// double (a different evaluation route than the library's continued
// fraction). Uses the reflection I_x(a,b) = 1 - I_{1-x}(b,a) to stay in the
// fast-converging region.
inline long double beta_series(long double x, long double a, long double b) {
  if (x <= 0.0L) return 0.0L;
  if (x >= 1.0L) return 1.0L;
  if (x > (a + 1.0L) / (a + b + 2.0L)) return 1.0L - beta_series(1.0L - x, b, a);
  const long double log_front = a * std::log(x) + b * std::log1p(-x) -
                                (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + b + n) / (a + 1.0L + n) * x;
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return std::exp(log_front) * sum / a;
}

inline double t_cdf_beta_series(double t, double df) {
  const long double x = df / (static_cast<long double>(t) * t + df);
  const long double half_tail = 0.5L * beta_series(x, 0.5L * df, 0.5L);
  return static_cast<double>(t >= 0.0 ? 1.0L - half_tail : half_tail);
}

// No-intercept least squares by bisection on the normal-equation residual
// g(alpha) = sum x * (y - alpha x), which is strictly decreasing in alpha
// whenever some x is nonzero.
inline double lsq_slope_bisect(const std::vector<double>& x, const std::vector<double>& y) {
  auto g = [&](double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * (y[i] - alpha * x[i]);
    return s;
  };
  double lo = -1.0, hi = 1.0;
  while (g(lo) < 0.0) lo *= 2.0;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Kolmogorov-Smirnov statistic against the uniform distribution on [0, 1].
inline double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - p[i]);
    d = std::max(d, p[i] - static_cast<double>(i) / n);
  }
  return d;
}

// Balanced confusion matrix: every row sums to the same per-class count,
// with enough diagonal mass that accuracy stays positive.
inline prunelab::ConfusionMatrix random_balanced_cm(prunelab::RngStream& rng) {
  const std::size_t classes = 2 + rng.next_below(9);      // 2..10
  const std::size_t per_class = 10 + rng.next_below(191); // 10..200
  prunelab::ConfusionMatrix cm(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t remaining = per_class;
    const std::size_t diag = per_class / 3 + rng.next_below(per_class - per_class / 3 + 1);
    cm.at(c, c) = diag;
    remaining -= diag;
    while (remaining > 0) {
      const std::size_t v = 1 + rng.next_below(remaining);
      cm.at(c, rng.next_below(classes)) += v;
      remaining -= v;
    }
  }
  return cm;
}

// Random profile pair derived from two random balanced confusion matrices
// over the same class count.
inline std::pair<prunelab::ClassBalanceProfile, prunelab::ClassBalanceProfile>
random_profile_pair(prunelab::RngStream& rng) {
  for (;;) {
    prunelab::ConfusionMatrix a = random_balanced_cm(rng);
    prunelab::ConfusionMatrix b = random_balanced_cm(rng);
    if (a.trace() == 0 || b.trace() == 0) continue;
    if (a.classes != b.classes) continue;
    const auto pa = prunelab::profile(a);
    double sxx = 0.0;
    for (double v : pa.normalized_balance) sxx += v * v;
    if (sxx == 0.0) continue;
    return {pa, prunelab::profile(b)};
  }
}

// Small random model (dense-only or conv) plus a matching random batch.
inline std::pair<prunelab::Model, prunelab::Batch> random_model_and_batch(
    prunelab::RngStream& rng, bool allow_conv = true) {
  using namespace prunelab;
  ArchitectureSpec spec;
  const bool conv = allow_conv && rng.next_below(2) == 0;
  if (conv) {
    const std::size_t side = 4 + rng.next_below(3);           // 4..6
    const std::size_t channels = 1 + rng.next_below(2);       // 1..2
    const std::size_t kernel = 2 + rng.next_below(2);         // 2..3
    const std::size_t out_c = 1 + rng.next_below(2);          // 1..2
    const std::size_t classes = 2 + rng.next_below(3);        // 2..4
    spec.input_shape = {side, side, channels};
    spec.num_classes = classes;
    const std::size_t flat = (side - kernel + 1) * (side - kernel + 1) * out_c;
    spec.layers = {LayerSpec::conv(out_c, kernel), LayerSpec::relu(), LayerSpec::flatten(),
                   LayerSpec::dense(flat, classes)};
  } else {
    const std::size_t in = 2 + rng.next_below(5);       // 2..6
    const std::size_t hidden = 2 + rng.next_below(7);   // 2..8
    const std::size_t classes = 2 + rng.next_below(3);  // 2..4
    spec.input_shape = {in};
    spec.num_classes = classes;
    spec.layers = {LayerSpec::dense(in, hidden), LayerSpec::relu(),
                   LayerSpec::dense(hidden, classes)};
  }
  Model model = build_model(spec, rng.next_u64());

  Batch batch;
  batch.dim = Tensor::element_count(spec.input_shape);
  batch.count = 2 + rng.next_below(7);
  batch.x.resize(batch.count * batch.dim);
  batch.y.resize(batch.count);
  for (auto& v : batch.x) v = rng.next_normal();
  for (auto& y : batch.y) y = static_cast<int>(rng.next_below(spec.num_classes));
  return {std::move(model), std::move(batch)};
}

}  // namespace oracles

#endif
