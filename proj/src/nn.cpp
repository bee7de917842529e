#include "prunelab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

namespace {

// Dot product with four accumulators; fixed association keeps results
// bit-reproducible while letting the compiler vectorize.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

struct Trace {
  // acts[0] is the input batch; acts[i+1] the output of layer i.
  // All tensors are {count, ...activation dims}.
  std::vector<Tensor> acts;
};

std::vector<std::size_t> with_batch(std::size_t n, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s;
  s.reserve(dims.size() + 1);
  s.push_back(n);
  s.insert(s.end(), dims.begin(), dims.end());
  return s;
}

void forward_pass(const Model& model, const Batch& batch, Trace& trace) {
  const auto shapes = model.arch.activation_shapes();
  const std::size_t n = batch.count;
  if (batch.dim != Tensor::element_count(shapes[0]))
    throw ShapeError("batch feature size does not match the model input");

  trace.acts.clear();
  trace.acts.reserve(model.arch.layers.size() + 1);
  Tensor input(with_batch(n, shapes[0]));
  std::copy(batch.x.begin(), batch.x.end(), input.data());
  trace.acts.push_back(std::move(input));

  for (std::size_t li = 0; li < model.arch.layers.size(); ++li) {
    const auto& layer = model.arch.layers[li];
    const Tensor& in = trace.acts.back();
    Tensor out(with_batch(n, shapes[li + 1]));
    switch (layer.kind) {
      case LayerKind::Dense: {
        const auto& p = model.params[li];
        const std::size_t I = layer.in, O = layer.out;
        for (std::size_t s = 0; s < n; ++s) {
          const double* xr = in.data() + s * I;
          double* yr = out.data() + s * O;
          for (std::size_t o = 0; o < O; ++o)
            yr[o] = p.bias[o] + dot(p.weights.data() + o * I, xr, I);
        }
        break;
      }
      case LayerKind::Conv: {
        const auto& p = model.params[li];
        const std::size_t H = shapes[li][0], W = shapes[li][1], C = shapes[li][2];
        const std::size_t HO = shapes[li + 1][0], WO = shapes[li + 1][1], O = layer.channels;
        const std::size_t K = layer.kernel;
        for (std::size_t s = 0; s < n; ++s) {
          const double* xs = in.data() + s * H * W * C;
          double* ys = out.data() + s * HO * WO * O;
          for (std::size_t y = 0; y < HO; ++y)
            for (std::size_t x = 0; x < WO; ++x)
              for (std::size_t o = 0; o < O; ++o) {
                double acc = p.bias[o];
                const double* wk = p.weights.data() + o * C * K * K;
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t ky = 0; ky < K; ++ky)
                    for (std::size_t kx = 0; kx < K; ++kx)
                      acc += xs[((y + ky) * W + (x + kx)) * C + c] * wk[(c * K + ky) * K + kx];
                ys[(y * WO + x) * O + o] = acc;
              }
        }
        break;
      }
      case LayerKind::Relu: {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
        break;
      }
      case LayerKind::Flatten: {
        std::copy(in.data(), in.data() + in.size(), out.data());
        break;
      }
    }
    trace.acts.push_back(std::move(out));
  }
}

// Sum of per-sample cross-entropies; optionally the gradient of that sum
// with respect to the logits.
double softmax_ce_sum(const Tensor& logits, const std::vector<int>& labels,
                      std::size_t classes, Tensor* dlogits) {
  const std::size_t n = labels.size();
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double* z = logits.data() + s * classes;
    const int label = labels[s];
    double m = z[0];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, z[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - m);
    total += std::log(sum) - (z[label] - m);
    if (dlogits) {
      double* d = dlogits->data() + s * classes;
      for (std::size_t c = 0; c < classes; ++c) d[c] = std::exp(z[c] - m) / sum;
      d[label] -= 1.0;
    }
  }
  return total;
}

// Accumulates gradients of the summed (not mean) loss into sums.
void backward_pass(const Model& model, const Trace& trace, Tensor dout, GradientSet& sums) {
  const auto shapes = model.arch.activation_shapes();
  const std::size_t n = trace.acts[0].shape()[0];
  for (std::size_t li = model.arch.layers.size(); li-- > 0;) {
    const auto& layer = model.arch.layers[li];
    const Tensor& in = trace.acts[li];
    Tensor din(with_batch(n, shapes[li]));
    switch (layer.kind) {
      case LayerKind::Dense: {
        const auto& p = model.params[li];
        const std::size_t I = layer.in, O = layer.out;
        Tensor& dw = sums.weights[li];
        auto& db = sums.bias[li];
        for (std::size_t s = 0; s < n; ++s) {
          const double* xr = in.data() + s * I;
          const double* dyr = dout.data() + s * O;
          double* dxr = din.data() + s * I;
          for (std::size_t o = 0; o < O; ++o) {
            const double g = dyr[o];
            if (g == 0.0) continue;
            db[o] += g;
            axpy(g, p.weights.data() + o * I, dxr, I);
            axpy(g, xr, dw.data() + o * I, I);
          }
        }
        break;
      }
      case LayerKind::Conv: {
        const auto& p = model.params[li];
        const std::size_t H = shapes[li][0], W = shapes[li][1], C = shapes[li][2];
        const std::size_t HO = shapes[li + 1][0], WO = shapes[li + 1][1], O = layer.channels;
        const std::size_t K = layer.kernel;
        Tensor& dw = sums.weights[li];
        auto& db = sums.bias[li];
        for (std::size_t s = 0; s < n; ++s) {
          const double* xs = in.data() + s * H * W * C;
          const double* dys = dout.data() + s * HO * WO * O;
          double* dxs = din.data() + s * H * W * C;
          for (std::size_t y = 0; y < HO; ++y)
            for (std::size_t x = 0; x < WO; ++x)
              for (std::size_t o = 0; o < O; ++o) {
                const double g = dys[(y * WO + x) * O + o];
                if (g == 0.0) continue;
                db[o] += g;
                const double* wk = p.weights.data() + o * C * K * K;
                double* dwk = dw.data() + o * C * K * K;
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t ky = 0; ky < K; ++ky)
                    for (std::size_t kx = 0; kx < K; ++kx) {
                      const std::size_t xi = ((y + ky) * W + (x + kx)) * C + c;
                      dwk[(c * K + ky) * K + kx] += g * xs[xi];
                      dxs[xi] += g * wk[(c * K + ky) * K + kx];
                    }
              }
        }
        break;
      }
      case LayerKind::Relu: {
        const Tensor& outv = trace.acts[li + 1];
        for (std::size_t i = 0; i < din.size(); ++i)
          din[i] = outv[i] > 0.0 ? dout[i] : 0.0;
        break;
      }
      case LayerKind::Flatten: {
        std::copy(dout.data(), dout.data() + dout.size(), din.data());
        break;
      }
    }
    dout = std::move(din);
  }
}

double decay_term(const Model& model, double eps) {
  if (eps == 0.0) return 0.0;
  double sq = 0.0;
  for (const auto& p : model.params)
    for (std::size_t i = 0; i < p.weights.size(); ++i)
      if (p.mask[i]) sq += p.weights[i] * p.weights[i];
  return 0.5 * eps * sq;
}

void check_batch(const Model& model, const Batch& batch) {
  if (batch.count == 0) throw InputError("empty batch");
  for (int label : batch.y)
    if (label < 0 || static_cast<std::size_t>(label) >= model.arch.num_classes)
      throw InputError("label " + std::to_string(label) + " outside [0, " +
                       std::to_string(model.arch.num_classes) + ")");
}

// Cross-entropy sums accumulated over a split in fixed chunks.
constexpr std::size_t kEvalChunk = 256;

}  // namespace

GradientSet zero_gradients(const Model& model) {
  GradientSet g;
  g.weights.resize(model.params.size());
  g.bias.resize(model.params.size());
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    if (model.params[i].empty()) continue;
    g.weights[i] = Tensor(model.params[i].weights.shape());
    g.bias[i].assign(model.params[i].bias.size(), 0.0);
  }
  return g;
}

double loss(const Model& model, const Batch& batch, double eps) {
  check_batch(model, batch);
  Trace trace;
  forward_pass(model, batch, trace);
  const double ce = softmax_ce_sum(trace.acts.back(), batch.y, model.arch.num_classes, nullptr);
  return ce / static_cast<double>(batch.count) + decay_term(model, eps);
}

namespace {

// Accumulates d(sum CE)/d(theta) into sums; returns the CE sum.
double accumulate_ce_gradient(const Model& model, const Batch& batch, GradientSet& sums) {
  Trace trace;
  forward_pass(model, batch, trace);
  Tensor dlogits(trace.acts.back().shape());
  const double ce = softmax_ce_sum(trace.acts.back(), batch.y, model.arch.num_classes, &dlogits);
  backward_pass(model, trace, std::move(dlogits), sums);
  return ce;
}

// sums/count + eps*theta on unmasked entries, exactly zero on masked ones.
GradientSet finalize_gradient(const Model& model, GradientSet sums, double count, double eps) {
  for (std::size_t li = 0; li < model.params.size(); ++li) {
    const auto& p = model.params[li];
    if (p.empty()) continue;
    Tensor& gw = sums.weights[li];
    for (std::size_t i = 0; i < gw.size(); ++i)
      gw[i] = p.mask[i] ? gw[i] / count + eps * p.weights[i] : 0.0;
    for (double& gb : sums.bias[li]) gb /= count;
  }
  return sums;
}

}  // namespace

GradientSet gradient(const Model& model, const Batch& batch, double eps) {
  check_batch(model, batch);
  GradientSet sums = zero_gradients(model);
  accumulate_ce_gradient(model, batch, sums);
  return finalize_gradient(model, std::move(sums), static_cast<double>(batch.count), eps);
}

GradientSet full_gradient(const Model& model, const Dataset& ds, Split split, double eps) {
  const auto& idx = ds.split_indices(split);
  if (idx.empty()) throw InputError("empty split");
  GradientSet sums = zero_gradients(model);
  for (std::size_t start = 0; start < idx.size(); start += kEvalChunk) {
    const std::size_t len = std::min(kEvalChunk, idx.size() - start);
    const Batch batch = make_batch(ds, {idx.data() + start, len});
    check_batch(model, batch);
    accumulate_ce_gradient(model, batch, sums);
  }
  return finalize_gradient(model, std::move(sums), static_cast<double>(idx.size()), eps);
}

void sgd_step(Model& model, const GradientSet& grads, double rate) {
  if (!(rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (grads.weights.size() != model.params.size())
    throw ShapeError("gradient set does not match the model");
  for (std::size_t li = 0; li < model.params.size(); ++li) {
    auto& p = model.params[li];
    if (p.empty()) continue;
    const Tensor& gw = grads.weights[li];
    if (!gw.same_shape(p.weights) || grads.bias[li].size() != p.bias.size())
      throw ShapeError("gradient shapes do not match layer " + std::to_string(li));
    for (std::size_t i = 0; i < p.weights.size(); ++i)
      p.weights[i] = p.mask[i] ? p.weights[i] - rate * gw[i] : 0.0;
    for (std::size_t i = 0; i < p.bias.size(); ++i)
      p.bias[i] -= rate * grads.bias[li][i];
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (schedule.empty()) throw ConfigError("learning rate schedule is empty");
  if (schedule.front().first != 1) throw ConfigError("schedule must start at epoch 1");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i].second > 0.0)) throw ConfigError("learning rates must be > 0");
    if (i && schedule[i].first <= schedule[i - 1].first)
      throw ConfigError("schedule epochs must be strictly increasing");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
}

double TrainConfig::rate_for_epoch(std::size_t epoch) const {
  double rate = schedule.front().second;
  for (const auto& [start, r] : schedule)
    if (start <= epoch) rate = r;
  return rate;
}

namespace {

std::pair<double, double> evaluate_split(const Model& model, const Dataset& ds, Split split,
                                         double eps) {
  const auto& idx = ds.split_indices(split);
  if (idx.empty()) throw InputError("empty split");
  double ce = 0.0;
  std::size_t correct = 0;
  Trace trace;
  for (std::size_t start = 0; start < idx.size(); start += kEvalChunk) {
    const std::size_t len = std::min(kEvalChunk, idx.size() - start);
    const Batch batch = make_batch(ds, {idx.data() + start, len});
    check_batch(model, batch);
    forward_pass(model, batch, trace);
    const Tensor& logits = trace.acts.back();
    ce += softmax_ce_sum(logits, batch.y, model.arch.num_classes, nullptr);
    const std::size_t classes = model.arch.num_classes;
    for (std::size_t s = 0; s < len; ++s) {
      const double* z = logits.data() + s * classes;
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c)
        if (z[c] > z[best]) best = c;
      correct += (static_cast<int>(best) == batch.y[s]) ? 1 : 0;
    }
  }
  const double n = static_cast<double>(idx.size());
  return {ce / n + decay_term(model, eps), static_cast<double>(correct) / n};
}

}  // namespace

TrainResult train(const Model& model, const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.split_indices(Split::Train).empty()) throw InputError("empty training split");
  if (ds.split_indices(Split::Validation).empty()) throw InputError("empty validation split");

  TrainResult result;
  Model current = model;
  Model best = model;
  double best_val = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(ds.train_idx);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto shuffle_rng = make_stream(cfg.seed, "shuffle", {epoch});
    order = ds.train_idx;
    fisher_yates(order, shuffle_rng);

    const double rate = cfg.rate_for_epoch(epoch);
    double ce_seen = 0.0;
    double decay_seen = 0.0;
    std::size_t batches = 0;
    GradientSet sums = zero_gradients(current);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const Batch batch = make_batch(ds, {order.data() + start, len});
      check_batch(current, batch);
      for (auto& t : sums.weights) t.fill(0.0);
      for (auto& b : sums.bias) std::fill(b.begin(), b.end(), 0.0);
      ce_seen += accumulate_ce_gradient(current, batch, sums);
      decay_seen += decay_term(current, cfg.weight_decay);
      ++batches;
      GradientSet grads = finalize_gradient(current, std::move(sums), static_cast<double>(len),
                                            cfg.weight_decay);
      sgd_step(current, grads, rate);
      sums = std::move(grads);
    }

    EpochStats stats;
    stats.train_loss = ce_seen / static_cast<double>(order.size()) +
                       (batches ? decay_seen / static_cast<double>(batches) : 0.0);
    auto [val_loss, val_acc] = evaluate_split(current, ds, Split::Validation, cfg.weight_decay);
    stats.val_loss = val_loss;
    stats.val_accuracy = val_acc;
    result.history.push_back(stats);
    if (val_loss < best_val) {
      best_val = val_loss;
      best = current;
      result.best_epoch = epoch;
    }
  }
  result.model = std::move(best);
  return result;
}

std::vector<int> predict(const Model& model, const double* x, std::size_t count) {
  const auto shapes = model.arch.activation_shapes();
  const std::size_t dim = Tensor::element_count(shapes[0]);
  const std::size_t classes = model.arch.num_classes;
  std::vector<int> out(count);
  Trace trace;
  for (std::size_t start = 0; start < count; start += kEvalChunk) {
    const std::size_t len = std::min(kEvalChunk, count - start);
    Batch batch;
    batch.count = len;
    batch.dim = dim;
    batch.x.assign(x + start * dim, x + (start + len) * dim);
    batch.y.assign(len, 0);
    forward_pass(model, batch, trace);
    const Tensor& logits = trace.acts.back();
    for (std::size_t s = 0; s < len; ++s) {
      const double* z = logits.data() + s * classes;
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c)
        if (z[c] > z[best]) best = c;
      out[start + s] = static_cast<int>(best);
    }
  }
  return out;
}

std::vector<int> predict(const Model& model, const Dataset& ds, Split split) {
  const auto& idx = ds.split_indices(split);
  const Batch batch = make_batch(ds, idx);
  return predict(model, batch.x.data(), batch.count);
}

}  // namespace prunelab
