#include "prunelab/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "prunelab/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; byte-swapped hosts are not supported");

namespace prunelab {

namespace {

constexpr char kMagic[5] = {'P', 'L', 'A', 'B', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64s(std::ostream& out, const double* v, std::size_t n) {
  out.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("truncated model file");
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("truncated model file");
  return v;
}
void read_f64s(std::istream& in, double* v, std::size_t n) {
  in.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw FormatError("truncated model file");
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());

  out.write(kMagic, sizeof kMagic);
  write_u32(out, static_cast<std::uint32_t>(model.arch.layers.size()));
  for (const auto& l : model.arch.layers) {
    switch (l.kind) {
      case LayerKind::Dense:
        out.put(0);
        write_u32(out, static_cast<std::uint32_t>(l.in));
        write_u32(out, static_cast<std::uint32_t>(l.out));
        break;
      case LayerKind::Conv:
        out.put(1);
        write_u32(out, static_cast<std::uint32_t>(l.channels));
        write_u32(out, static_cast<std::uint32_t>(l.kernel));
        break;
      case LayerKind::Relu: out.put(2); break;
      case LayerKind::Flatten: out.put(3); break;
    }
  }
  write_u32(out, static_cast<std::uint32_t>(model.arch.input_shape.size()));
  for (std::size_t d : model.arch.input_shape) write_u32(out, static_cast<std::uint32_t>(d));
  write_u32(out, static_cast<std::uint32_t>(model.arch.num_classes));

  for (const auto& p : model.params) {
    if (p.empty()) continue;
    write_u64(out, p.weights.size());
    write_f64s(out, p.weights.data(), p.weights.size());
    write_u64(out, p.bias.size());
    write_f64s(out, p.bias.data(), p.bias.size());
  }
  for (const auto& p : model.params) {
    if (p.empty()) continue;
    write_u64(out, p.mask.size());
    std::vector<std::uint8_t> packed((p.mask.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < p.mask.size(); ++i)
      if (p.mask[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FormatError("bad magic in " + path.string());

  ArchitectureSpec spec;
  const std::uint32_t layer_count = read_u32(in);
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const int kind = in.get();
    if (kind == EOF) throw FormatError("truncated model file");
    switch (kind) {
      case 0: {
        const std::uint32_t lin = read_u32(in);
        const std::uint32_t lout = read_u32(in);
        spec.layers.push_back(LayerSpec::dense(lin, lout));
        break;
      }
      case 1: {
        const std::uint32_t ch = read_u32(in);
        const std::uint32_t k = read_u32(in);
        spec.layers.push_back(LayerSpec::conv(ch, k));
        break;
      }
      case 2: spec.layers.push_back(LayerSpec::relu()); break;
      case 3: spec.layers.push_back(LayerSpec::flatten()); break;
      default: throw FormatError("unknown layer kind in model file");
    }
  }
  const std::uint32_t ndim = read_u32(in);
  for (std::uint32_t i = 0; i < ndim; ++i) spec.input_shape.push_back(read_u32(in));
  spec.num_classes = read_u32(in);
  spec.validate();

  Model model = build_model(spec, 0);
  for (auto& p : model.params) {
    if (p.empty()) continue;
    if (read_u64(in) != p.weights.size()) throw FormatError("weight count mismatch");
    read_f64s(in, p.weights.data(), p.weights.size());
    if (read_u64(in) != p.bias.size()) throw FormatError("bias count mismatch");
    read_f64s(in, p.bias.data(), p.bias.size());
  }
  for (auto& p : model.params) {
    if (p.empty()) continue;
    if (read_u64(in) != p.mask.size()) throw FormatError("mask count mismatch");
    std::vector<std::uint8_t> packed((p.mask.size() + 7) / 8);
    in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    if (!in) throw FormatError("truncated model file");
    for (std::size_t i = 0; i < p.mask.size(); ++i)
      p.mask[i] = (packed[i / 8] >> (i % 8)) & 1u;
    for (std::size_t i = 0; i < p.mask.size(); ++i)
      if (!p.mask[i] && p.weights[i] != 0.0)
        throw FormatError("masked weight is nonzero in " + path.string());
  }
  return model;
}

}  // namespace prunelab
