#pragma once

// Plane through a sample triplet: orthonormal frame, plot bounds, probe grid
// and the embedding from plane coordinates back into input space.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tribound {

using ClassId = std::uint32_t;
using Vector = std::vector<double>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Three clean inputs of identical dimension. `labels` are the oracle's
/// predictions on the raw samples when known.
struct SampleTriplet {
  Vector x1, x2, x3;
  std::optional<std::array<ClassId, 3>> labels;

  std::size_t dim() const { return x1.size(); }
};

/// Orthonormal frame of the plane through a triplet, anchored at x1.
struct PlaneBasis {
  Vector origin;
  Vector e1, e2;
  /// (0,0), (|v1|, 0), (<v2,e1>, <v2,e2>)
  std::array<Point2, 3> anchor_coords;

  std::size_t dim() const { return origin.size(); }
};

struct PlotBounds {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double eta = 1.0;

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

/// S*S lattice over the bounds, row-major, top row (y_max) first, columns
/// left (x_min) to right.
struct ProbeGrid {
  std::vector<Point2> coords;
  std::size_t density = 0;
};

/// Optional per-dimension clamp applied after embedding.
struct ClampRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Relative tolerance below which v1 or the orthogonal part of v2 counts as
/// zero.
inline constexpr double kDegeneracyTolerance = 1e-7;
/// Floor for a zero-extent bounds axis, relative to |v1|.
inline constexpr double kMinHalfExtent = 1e-6;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Gram-Schmidt frame of span{x2 - x1, x3 - x1}. Throws DegenerateTriplet for
/// duplicated or collinear samples and ShapeMismatch for ragged inputs.
PlaneBasis span_plane(const SampleTriplet& triplet);

/// Per axis: centre c and half-range h of the three anchors, bounds
/// [c - eta*h, c + eta*h]. eta = 1 brackets the anchors exactly.
PlotBounds make_bounds(const PlaneBasis& basis, double eta);

ProbeGrid make_grid(const PlotBounds& bounds, std::size_t density);

/// origin + coord.x * e1 + coord.y * e2, optionally clamped.
Vector embed_point(const PlaneBasis& basis, Point2 coord,
                   std::optional<ClampRange> clamp = std::nullopt);

/// Allocation-free form of embed_point; `out` must have basis.dim() entries.
void embed_point_into(const PlaneBasis& basis, Point2 coord,
                      std::span<double> out,
                      std::optional<ClampRange> clamp = std::nullopt);

}  // namespace tribound
