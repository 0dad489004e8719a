#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tribound/geometry.hpp"
#include "tribound/oracle.hpp"

namespace tribound {

/// Hard-label map of one triplet plane, in ProbeGrid raster order.
struct BoundaryMap {
  std::size_t density = 0;
  std::size_t n_classes = 0;
  std::vector<ClassId> labels;  ///< density * density cells
  PlotBounds bounds;
  std::array<Point2, 3> anchor_coords{};
  std::array<ClassId, 3> anchor_labels{};
  std::size_t triplet_id = 0;
  std::uint64_t seed = 0;

  ClassId at(std::size_t row, std::size_t col) const {
    return labels[row * density + col];
  }
};

/// Per-class area fractions of a map.
struct LabelDistribution {
  std::vector<double> p;
};

struct PlotOptions {
  std::optional<ClampRange> clamp;
  std::size_t jobs = 1;
  /// Grid points embedded and sent to the oracle per sub-batch.
  std::size_t chunk = 512;
};

/// span_plane -> make_bounds -> make_grid -> embed -> predict. Anchor labels
/// are the oracle's predictions on x1, x2, x3 themselves.
BoundaryMap plot_boundary(const Oracle& oracle, const SampleTriplet& triplet,
                          double eta, std::size_t density,
                          const PlotOptions& options = {});

/// p_m = (#cells labelled m) / S^2.
LabelDistribution label_distribution(const BoundaryMap& map);

/// Row and column of the cell nearest a plane coordinate, clamped to the grid.
std::pair<std::size_t, std::size_t> nearest_cell(const BoundaryMap& map, Point2 p);

// Rendering -----------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Anchor marker colour; never produced by default_palette().
inline constexpr Rgb kMarkerColor{0, 0, 0};

/// The 20 tab20 colours; classes beyond 20 reuse them darkened by 15% per
/// wrap (floored at 40% brightness).
std::vector<Rgb> default_palette(std::size_t n_classes);

struct Image {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  ///< width * height * 3

  Rgb pixel(std::size_t x, std::size_t y) const {
    const std::size_t i = 3 * (y * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

/// One scale x scale block per cell, then a 3x3 marker (in pixels) centred on
/// each anchor's nearest cell. Throws PaletteTooSmall.
Image rasterize(const BoundaryMap& map, std::span<const Rgb> palette,
                std::size_t scale = 1);

/// 8-bit RGB PNG, no alpha, no timestamps.
std::vector<std::uint8_t> encode_png(const Image& image);

std::vector<std::uint8_t> render_image(const BoundaryMap& map,
                                       std::span<const Rgb> palette,
                                       std::size_t scale = 1);

}  // namespace tribound
