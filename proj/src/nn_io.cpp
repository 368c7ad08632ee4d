#include <bit>
#include <cstring>
#include <fstream>

#include "piglet/nn.hpp"

namespace piglet::nn {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(bytes), 4);
}

void put_f32(std::ostream& os, float f) { put_u32(os, std::bit_cast<std::uint32_t>(f)); }

bool get_u32(std::istream& is, std::uint32_t* v) {
  unsigned char bytes[4];
  if (!is.read(reinterpret_cast<char*>(bytes), 4)) return false;
  *v = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
       (static_cast<std::uint32_t>(bytes[2]) << 16) |
       (static_cast<std::uint32_t>(bytes[3]) << 24);
  return true;
}

bool get_f32(std::istream& is, float* f) {
  std::uint32_t u;
  if (!get_u32(is, &u)) return false;
  *f = std::bit_cast<float>(u);
  return true;
}

struct LayerRecord {
  LayerKind kind;
  Shape dims;
};

[[noreturn]] void truncated(int layer_index) {
  throw std::runtime_error("weights file truncated in layer " + std::to_string(layer_index));
}

LayerRecord read_layer_header(std::istream& is, int layer_index) {
  unsigned char kind_byte, rank;
  if (!is.read(reinterpret_cast<char*>(&kind_byte), 1)) truncated(layer_index);
  if (kind_byte > static_cast<unsigned char>(LayerKind::Flatten))
    throw std::runtime_error("weights file: unknown layer kind " +
                             std::to_string(static_cast<int>(kind_byte)));
  if (!is.read(reinterpret_cast<char*>(&rank), 1)) truncated(layer_index);
  LayerRecord rec;
  rec.kind = static_cast<LayerKind>(kind_byte);
  rec.dims.resize(rank);
  for (int i = 0; i < rank; ++i) {
    std::uint32_t d;
    if (!get_u32(is, &d)) truncated(layer_index);
    rec.dims[i] = static_cast<int>(d);
  }
  return rec;
}

std::unique_ptr<Layer> layer_from_record(const LayerRecord& rec) {
  switch (rec.kind) {
    case LayerKind::Dense:
      if (rec.dims.size() != 2) throw std::runtime_error("weights file: bad Dense dims");
      return make_dense(rec.dims[1], rec.dims[0]);
    case LayerKind::Conv1D:
      if (rec.dims.size() != 3) throw std::runtime_error("weights file: bad Conv1D dims");
      return make_conv1d(rec.dims[1], rec.dims[0], rec.dims[2]);
    case LayerKind::Conv2D:
      if (rec.dims.size() != 4 || rec.dims[2] != rec.dims[3])
        throw std::runtime_error("weights file: bad Conv2D dims");
      return make_conv2d(rec.dims[1], rec.dims[0], rec.dims[2]);
    case LayerKind::MaxPool2D:
      if (!rec.dims.empty()) throw std::runtime_error("weights file: bad MaxPool2D dims");
      return make_maxpool2d();
    case LayerKind::PReLU:
      if (rec.dims.size() != 1) throw std::runtime_error("weights file: bad PReLU dims");
      return make_prelu(rec.dims[0]);
    case LayerKind::Flatten:
      if (!rec.dims.empty()) throw std::runtime_error("weights file: bad Flatten dims");
      return make_flatten();
  }
  throw std::runtime_error("weights file: unknown layer kind");
}

void read_layer_params(std::istream& is, Layer& layer, int layer_index) {
  for (int j = 0; j < layer.n_arrays(); ++j) {
    auto& values = layer.array_values(j);
    for (auto& v : values)
      if (!get_f32(is, &v)) truncated(layer_index);
  }
}

}  // namespace

void save_weights(const Network& network, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(network.n_layers()));
  for (int i = 0; i < network.n_layers(); ++i) {
    // Serialization needs mutable array access; the values are not modified.
    Layer& layer = const_cast<Network&>(network).layer(i);
    const unsigned char kind_byte = static_cast<unsigned char>(layer.kind());
    os.write(reinterpret_cast<const char*>(&kind_byte), 1);
    const Shape dims = layer.serial_dims();
    const unsigned char rank = static_cast<unsigned char>(dims.size());
    os.write(reinterpret_cast<const char*>(&rank), 1);
    for (int d : dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (int j = 0; j < layer.n_arrays(); ++j)
      for (float v : layer.array_values(j)) put_f32(os, v);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Network load_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("weights file: bad magic");
  std::uint32_t version, n_layers;
  if (!get_u32(is, &version) || version != kVersion)
    throw std::runtime_error("weights file: unsupported version");
  if (!get_u32(is, &n_layers)) throw std::runtime_error("weights file: truncated header");

  Network network;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const LayerRecord rec = read_layer_header(is, static_cast<int>(i));
    auto layer = layer_from_record(rec);
    read_layer_params(is, *layer, static_cast<int>(i));
    network.add(std::move(layer));
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("weights file: trailing data");
  return network;
}

void load_into(Network& network, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("weights file: bad magic");
  std::uint32_t version, n_layers;
  if (!get_u32(is, &version) || version != kVersion)
    throw std::runtime_error("weights file: unsupported version");
  if (!get_u32(is, &n_layers)) throw std::runtime_error("weights file: truncated header");
  if (static_cast<int>(n_layers) != network.n_layers())
    throw std::runtime_error("weights file: layer count mismatch vs architecture");

  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const LayerRecord rec = read_layer_header(is, static_cast<int>(i));
    Layer& layer = network.layer(static_cast<int>(i));
    if (rec.kind != layer.kind() || rec.dims != layer.serial_dims())
      throw std::runtime_error("weights file: shape mismatch vs architecture in layer " +
                               std::to_string(i));
    read_layer_params(is, layer, static_cast<int>(i));
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("weights file: trailing data");
}

}  // namespace piglet::nn
