#include "prunelab/idx.hpp"

#include <zlib.h>

#include <fstream>

#include "prunelab/error.hpp"

namespace prunelab {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed,
                                 const std::string& what) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib init failed");
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> buffer(1 << 16);
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buffer.data();
    zs.avail_out = static_cast<uInt>(buffer.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("corrupt gzip stream in " + what);
    }
    out.insert(out.end(), buffer.data(), buffer.data() + (buffer.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw FormatError("truncated gzip stream in " + what);
    }
  }
  inflateEnd(&zs);
  return out;
}

std::uint32_t read_be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

}  // namespace

IdxArray read_idx(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
    bytes = gunzip(bytes, path.string());
  if (bytes.size() < 4) throw FormatError("file too short for an IDX header: " + path.string());

  const std::uint32_t magic = read_be32(bytes.data());
  if (magic != kImageMagic && magic != kLabelMagic)
    throw FormatError("bad IDX magic in " + path.string());
  const std::size_t ndim = magic == kImageMagic ? 3 : 1;
  if (bytes.size() < 4 + 4 * ndim)
    throw FormatError("truncated IDX header in " + path.string());

  IdxArray out;
  std::size_t payload = 1;
  for (std::size_t d = 0; d < ndim; ++d) {
    out.dims.push_back(read_be32(bytes.data() + 4 + 4 * d));
    payload *= out.dims.back();
  }
  const std::size_t header = 4 + 4 * ndim;
  if (bytes.size() != header + payload)
    throw FormatError("IDX payload size mismatch in " + path.string() + " (expected " +
                      std::to_string(payload) + " bytes, found " +
                      std::to_string(bytes.size() - header) + ")");
  out.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return out;
}

namespace {

void append_pair(Dataset& ds, const IdxArray& images, const IdxArray& labels,
                 std::vector<std::size_t>& split, const std::string& what) {
  if (images.dims.size() != 3) throw FormatError(what + ": images must have 3 dims");
  if (labels.dims.size() != 1) throw FormatError(what + ": labels must have 1 dim");
  if (images.dims[0] != labels.dims[0])
    throw FormatError(what + ": image/label count mismatch (" + std::to_string(images.dims[0]) +
                      " vs " + std::to_string(labels.dims[0]) + ")");
  const std::vector<std::size_t> shape = {images.dims[1], images.dims[2], 1};
  if (ds.input_shape.empty())
    ds.input_shape = shape;
  else if (ds.input_shape != shape)
    throw FormatError(what + ": image dimensions differ between train and test");

  const std::size_t base = ds.labels.size();
  ds.features.reserve(ds.features.size() + images.data.size());
  for (std::uint8_t b : images.data)
    ds.features.push_back(static_cast<float>(b) / 255.0f);
  for (std::size_t i = 0; i < labels.data.size(); ++i) {
    ds.labels.push_back(static_cast<int>(labels.data[i]));
    split.push_back(base + i);
  }
}

}  // namespace

Dataset load_idx(const IdxPaths& paths, const IdxOptions& opts) {
  Dataset ds;
  ds.name = opts.name;
  append_pair(ds, read_idx(paths.train_images), read_idx(paths.train_labels), ds.train_idx,
              "train set");
  append_pair(ds, read_idx(paths.test_images), read_idx(paths.test_labels), ds.test_idx,
              "test set");
  int max_label = 0;
  for (int l : ds.labels) max_label = std::max(max_label, l);
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  if (ds.num_classes < 2) throw FormatError("labels describe fewer than 2 classes");
  ds.validate();
  if (opts.force_balance) ds.force_balance_test();
  ds.update_balanced_flag();
  return ds;
}

}  // namespace prunelab
