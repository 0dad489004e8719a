#pragma once

// MXT1 tensor files.
//
//   offset 0   "MXT1"
//   offset 4   u8 dtype (1 = float32)
//   offset 5   u8 rank
//   offset 6   2 zero bytes
//   offset 8   rank x u32 little-endian dims
//   then       payload, little-endian, row-major

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tribound {

inline constexpr std::uint8_t kMxtFloat32 = 1;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
};

std::vector<std::uint8_t> encode_mxt(const Tensor& tensor);
/// Throws ConfigError on bad magic, unknown dtype, non-zero pad or a payload
/// whose size disagrees with the dims.
Tensor decode_mxt(std::span<const std::uint8_t> bytes);

void write_mxt(const std::filesystem::path& file, const Tensor& tensor);
Tensor read_mxt(const std::filesystem::path& file);

/// Tabulated-oracle table: rows of inputs with their label in the last column.
Tensor make_label_table(std::span<const double> rows, std::size_t dim,
                        std::span<const std::uint32_t> labels);

}  // namespace tribound
