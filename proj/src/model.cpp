#include "prunelab/model.hpp"

#include "prunelab/error.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

std::size_t Model::weight_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.weights.size();
  return n;
}

std::size_t Model::unmasked_count() const {
  std::size_t n = 0;
  for (const auto& p : params)
    for (std::uint8_t m : p.mask) n += m ? 1 : 0;
  return n;
}

std::vector<std::size_t> Model::parameterized_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!params[i].empty()) out.push_back(i);
  return out;
}

void Model::zero_masked() {
  for (auto& p : params)
    for (std::size_t i = 0; i < p.mask.size(); ++i)
      if (!p.mask[i]) p.weights[i] = 0.0;
}

std::uint64_t Model::mask_fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : params) {
    for (std::uint8_t m : p.mask) {
      h ^= m;
      h *= 0x100000001b3ULL;
    }
    h = detail::mix64(h, p.mask.size());
  }
  return h;
}

Model build_model(const ArchitectureSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto shapes = spec.activation_shapes();

  Model model;
  model.arch = spec;
  model.params.resize(spec.layers.size());
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    if (!l.parameterized()) continue;
    LayerParams& p = model.params[i];
    std::size_t fan_in = 0, fan_out = 0;
    if (l.kind == LayerKind::Dense) {
      p.weights = Tensor({l.out, l.in});
      p.bias.assign(l.out, 0.0);
      fan_in = l.in;
      fan_out = l.out;
    } else {  // conv
      const std::size_t in_channels = shapes[i][2];
      p.weights = Tensor({l.channels, in_channels, l.kernel, l.kernel});
      p.bias.assign(l.channels, 0.0);
      fan_in = in_channels * l.kernel * l.kernel;
      fan_out = l.channels * l.kernel * l.kernel;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    auto rng = make_stream(seed, "init", {i});
    for (std::size_t k = 0; k < p.weights.size(); ++k)
      p.weights[k] = bound * (2.0 * rng.next_unit() - 1.0);
    p.mask.assign(p.weights.size(), 1);
  }
  return model;
}

}  // namespace prunelab
