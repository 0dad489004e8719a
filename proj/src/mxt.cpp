#include "tribound/mxt.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tribound/error.hpp"

namespace tribound {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_mxt(const Tensor& tensor) {
  if (tensor.dims.size() > 255) throw ConfigError("MXT rank exceeds 255");
  if (tensor.data.size() != tensor.element_count()) {
    throw ShapeMismatch("tensor payload does not match its dims");
  }
  std::vector<std::uint8_t> out{'M', 'X', 'T', '1', kMxtFloat32,
                                static_cast<std::uint8_t>(tensor.dims.size()), 0, 0};
  out.reserve(8 + 4 * tensor.dims.size() + 4 * tensor.data.size());
  for (auto d : tensor.dims) put_u32(out, d);
  for (float f : tensor.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_mxt(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "MXT1", 4) != 0) {
    throw ConfigError("not an MXT1 file");
  }
  if (bytes[4] != kMxtFloat32) {
    throw ConfigError("unsupported MXT dtype " + std::to_string(bytes[4]));
  }
  if (bytes[6] != 0 || bytes[7] != 0) throw ConfigError("MXT pad bytes not zero");
  const std::size_t rank = bytes[5];
  if (bytes.size() < 8 + 4 * rank) throw ConfigError("truncated MXT header");

  Tensor t;
  t.dims.resize(rank);
  for (std::size_t i = 0; i < rank; ++i) t.dims[i] = get_u32(bytes.data() + 8 + 4 * i);
  const std::size_t count = t.element_count();
  const std::size_t offset = 8 + 4 * rank;
  if (bytes.size() - offset != 4 * count) {
    throw ConfigError("MXT payload has " + std::to_string(bytes.size() - offset) +
                      " bytes, dims require " + std::to_string(4 * count));
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.data[i] = std::bit_cast<float>(get_u32(bytes.data() + offset + 4 * i));
  }
  return t;
}

void write_mxt(const std::filesystem::path& file, const Tensor& tensor) {
  const auto bytes = encode_mxt(tensor);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("short write to " + file.string());
}

Tensor read_mxt(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_mxt(bytes);
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

Tensor make_label_table(std::span<const double> rows, std::size_t dim,
                        std::span<const std::uint32_t> labels) {
  if (rows.size() != labels.size() * dim) {
    throw ShapeMismatch("label table rows and labels disagree");
  }
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(labels.size()),
            static_cast<std::uint32_t>(dim + 1)};
  t.data.reserve(labels.size() * (dim + 1));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    for (std::size_t i = 0; i < dim; ++i) {
      t.data.push_back(static_cast<float>(rows[r * dim + i]));
    }
    t.data.push_back(static_cast<float>(labels[r]));
  }
  return t;
}

}  // namespace tribound
