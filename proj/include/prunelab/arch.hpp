#ifndef PRUNELAB_ARCH_HPP
#define PRUNELAB_ARCH_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace prunelab {

enum class LayerKind { Dense, Conv, Relu, Flatten };

// One layer of a feed-forward net. Dense carries explicit (in, out) sizes;
// Conv carries output channels and a square kernel size, with input channels
// inferred from the incoming activation shape. Relu and Flatten have no
// parameters.
struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  std::size_t in = 0;        // dense only
  std::size_t out = 0;       // dense only
  std::size_t channels = 0;  // conv only
  std::size_t kernel = 0;    // conv only

  static LayerSpec dense(std::size_t in, std::size_t out) {
    return {LayerKind::Dense, in, out, 0, 0};
  }
  static LayerSpec conv(std::size_t channels, std::size_t kernel) {
    return {LayerKind::Conv, 0, 0, channels, kernel};
  }
  static LayerSpec relu() { return {LayerKind::Relu, 0, 0, 0, 0}; }
  static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0, 0, 0}; }

  bool parameterized() const {
    return kind == LayerKind::Dense || kind == LayerKind::Conv;
  }
};

struct ArchitectureSpec {
  std::string name;  // label used in records and reports; defaults to the layer string
  std::vector<LayerSpec> layers;
  std::vector<std::size_t> input_shape;  // {D} for flat input, {H, W, C} for images
  std::size_t num_classes = 0;

  // Throws ShapeError / ConfigError when the layer shapes do not compose,
  // there is no parameterized layer, or num_classes < 2.
  void validate() const;

  // Activation shape at each layer boundary: index 0 is the input shape,
  // index i the output of layer i-1. Validates as a side effect.
  std::vector<std::vector<std::size_t>> activation_shapes() const;

  std::size_t parameter_count() const;  // weights + biases
  std::size_t weight_count() const;     // weights only (the prunable set)

  std::string layer_string() const;
  std::string label() const { return name.empty() ? layer_string() : name; }

  // Parses the format emitted by layer_string():
  //   "in=28x28x1;classes=10;layers=flatten,dense(784,100),relu,dense(100,10)"
  static ArchitectureSpec parse(const std::string& text);
};

}  // namespace prunelab

#endif
