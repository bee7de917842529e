#include "prunelab/arch.hpp"

#include <sstream>

#include "prunelab/error.hpp"

namespace prunelab {

namespace {

std::vector<std::size_t> step_shape(const LayerSpec& layer,
                                    const std::vector<std::size_t>& in,
                                    std::size_t index) {
  auto fail = [&](const std::string& why) -> std::vector<std::size_t> {
    throw ShapeError("layer " + std::to_string(index) + ": " + why);
  };
  switch (layer.kind) {
    case LayerKind::Dense: {
      if (in.size() != 1) return fail("dense expects a flat input, got rank " + std::to_string(in.size()));
      if (in[0] != layer.in)
        return fail("dense expects " + std::to_string(layer.in) + " inputs, got " + std::to_string(in[0]));
      if (layer.out == 0) return fail("dense output size must be positive");
      return {layer.out};
    }
    case LayerKind::Conv: {
      if (in.size() != 3) return fail("conv expects an HxWxC input, got rank " + std::to_string(in.size()));
      if (layer.kernel == 0 || layer.channels == 0) return fail("conv kernel and channels must be positive");
      if (in[0] < layer.kernel || in[1] < layer.kernel)
        return fail("conv kernel " + std::to_string(layer.kernel) + " larger than input " +
                    std::to_string(in[0]) + "x" + std::to_string(in[1]));
      return {in[0] - layer.kernel + 1, in[1] - layer.kernel + 1, layer.channels};
    }
    case LayerKind::Relu:
      return in;
    case LayerKind::Flatten: {
      std::size_t n = 1;
      for (std::size_t d : in) n *= d;
      return {n};
    }
  }
  return fail("unknown layer kind");
}

}  // namespace

std::vector<std::vector<std::size_t>> ArchitectureSpec::activation_shapes() const {
  if (input_shape.empty()) throw ShapeError("input shape is empty");
  for (std::size_t d : input_shape)
    if (d == 0) throw ShapeError("input shape has a zero dimension");
  if (input_shape.size() != 1 && input_shape.size() != 3)
    throw ShapeError("input shape must be {D} or {H, W, C}");
  std::vector<std::vector<std::size_t>> shapes;
  shapes.push_back(input_shape);
  for (std::size_t i = 0; i < layers.size(); ++i)
    shapes.push_back(step_shape(layers[i], shapes.back(), i));
  return shapes;
}

void ArchitectureSpec::validate() const {
  if (num_classes < 2) throw ConfigError("class count must be at least 2");
  if (layers.empty()) throw ConfigError("architecture has no layers");
  bool parameterized = false;
  for (const auto& l : layers) parameterized = parameterized || l.parameterized();
  if (!parameterized) throw ConfigError("architecture has no parameterized layer");
  const auto shapes = activation_shapes();
  const auto& out = shapes.back();
  if (out.size() != 1 || out[0] != num_classes)
    throw ShapeError("final layer must emit " + std::to_string(num_classes) +
                     " logits, got rank " + std::to_string(out.size()));
}

std::size_t ArchitectureSpec::weight_count() const {
  const auto shapes = activation_shapes();
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.kind == LayerKind::Dense) n += l.in * l.out;
    if (l.kind == LayerKind::Conv) n += l.channels * shapes[i][2] * l.kernel * l.kernel;
  }
  return n;
}

std::size_t ArchitectureSpec::parameter_count() const {
  std::size_t n = weight_count();
  for (const auto& l : layers) {
    if (l.kind == LayerKind::Dense) n += l.out;
    if (l.kind == LayerKind::Conv) n += l.channels;
  }
  return n;
}

std::string ArchitectureSpec::layer_string() const {
  std::ostringstream out;
  out << "in=";
  for (std::size_t i = 0; i < input_shape.size(); ++i)
    out << (i ? "x" : "") << input_shape[i];
  out << ";classes=" << num_classes << ";layers=";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out << ",";
    const auto& l = layers[i];
    switch (l.kind) {
      case LayerKind::Dense: out << "dense(" << l.in << "," << l.out << ")"; break;
      case LayerKind::Conv: out << "conv(" << l.channels << "," << l.kernel << ")"; break;
      case LayerKind::Relu: out << "relu"; break;
      case LayerKind::Flatten: out << "flatten"; break;
    }
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

// Splits on sep outside parentheses, so "dense(784,100),relu" stays intact.
std::vector<std::string> split_items(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(strip(s), &pos);
    if (pos != strip(s).size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + ": '" + s + "'");
  }
}

}  // namespace

LayerSpec parse_layer_item(const std::string& raw) {
  const std::string item = strip(raw);
  if (item == "relu") return LayerSpec::relu();
  if (item == "flatten") return LayerSpec::flatten();
  const auto open = item.find('(');
  const auto close = item.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ConfigError("cannot parse layer: '" + item + "'");
  const std::string kind = strip(item.substr(0, open));
  const auto args = split(item.substr(open + 1, close - open - 1), ',');
  if (args.size() != 2) throw ConfigError("layer '" + item + "' needs two arguments");
  if (kind == "dense")
    return LayerSpec::dense(parse_size(args[0], "dense in"), parse_size(args[1], "dense out"));
  if (kind == "conv")
    return LayerSpec::conv(parse_size(args[0], "conv channels"), parse_size(args[1], "conv kernel"));
  throw ConfigError("unknown layer kind: '" + kind + "'");
}

ArchitectureSpec ArchitectureSpec::parse(const std::string& text) {
  ArchitectureSpec spec;
  for (const auto& field : split(text, ';')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("bad architecture field: '" + field + "'");
    const std::string key = strip(field.substr(0, eq));
    const std::string value = strip(field.substr(eq + 1));
    if (key == "in") {
      for (const auto& d : split(value, 'x'))
        spec.input_shape.push_back(parse_size(d, "input dimension"));
    } else if (key == "classes") {
      spec.num_classes = parse_size(value, "class count");
    } else if (key == "layers") {
      for (const auto& item : split_items(value, ','))
        if (!strip(item).empty()) spec.layers.push_back(parse_layer_item(item));
    } else {
      throw ConfigError("unknown architecture field: '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace prunelab
