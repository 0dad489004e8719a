#include "tribound/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "tribound/error.hpp"

namespace tribound {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

PlaneBasis span_plane(const SampleTriplet& triplet) {
  const std::size_t d = triplet.x1.size();
  if (d < 2 || triplet.x2.size() != d || triplet.x3.size() != d) {
    throw ShapeMismatch("triplet samples must share a dimension >= 2 (got " +
                        std::to_string(triplet.x1.size()) + ", " +
                        std::to_string(triplet.x2.size()) + ", " +
                        std::to_string(triplet.x3.size()) + ")");
  }

  Vector v1(d), v2(d);
  for (std::size_t i = 0; i < d; ++i) {
    v1[i] = triplet.x2[i] - triplet.x1[i];
    v2[i] = triplet.x3[i] - triplet.x1[i];
  }

  const double scale =
      std::max({1.0, norm(triplet.x1), norm(triplet.x2), norm(triplet.x3)});
  const double len1 = norm(v1);
  if (!(len1 > kDegeneracyTolerance * scale)) {
    throw DegenerateTriplet("x1 and x2 coincide");
  }

  PlaneBasis basis;
  basis.origin = triplet.x1;
  basis.e1.resize(d);
  for (std::size_t i = 0; i < d; ++i) basis.e1[i] = v1[i] / len1;

  const double along = dot(v2, basis.e1);
  Vector beta2(d);
  for (std::size_t i = 0; i < d; ++i) beta2[i] = v2[i] - along * basis.e1[i];
  const double len2 = norm(beta2);
  if (!(len2 > kDegeneracyTolerance * norm(v2))) {
    throw DegenerateTriplet("x3 - x1 is parallel to x2 - x1");
  }
  basis.e2.resize(d);
  for (std::size_t i = 0; i < d; ++i) basis.e2[i] = beta2[i] / len2;

  // A second pass removes the residual e1 component left by rounding in
  // high dimension; it keeps |<e1,e2>| at the 1e-16 level.
  const double leak = dot(basis.e2, basis.e1);
  for (std::size_t i = 0; i < d; ++i) basis.e2[i] -= leak * basis.e1[i];
  const double renorm = norm(basis.e2);
  for (double& v : basis.e2) v /= renorm;

  basis.anchor_coords = {Point2{0.0, 0.0}, Point2{len1, 0.0},
                         Point2{dot(v2, basis.e1), dot(v2, basis.e2)}};
  return basis;
}

PlotBounds make_bounds(const PlaneBasis& basis, double eta) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) {
    throw InvalidEta("expansion factor must be >= 1, got " +
                     std::to_string(eta));
  }
  const auto& a = basis.anchor_coords;
  const double floor_h = kMinHalfExtent * a[1].x;

  auto axis = [&](double p0, double p1, double p2) {
    const double lo = std::min({p0, p1, p2});
    const double hi = std::max({p0, p1, p2});
    const double c = 0.5 * (lo + hi);
    const double h = std::max(0.5 * (hi - lo), floor_h);
    return std::pair{c - eta * h, c + eta * h};
  };

  PlotBounds b;
  std::tie(b.x_min, b.x_max) = axis(a[0].x, a[1].x, a[2].x);
  std::tie(b.y_min, b.y_max) = axis(a[0].y, a[1].y, a[2].y);
  b.eta = eta;
  return b;
}

namespace {

// i-th of `n` equally spaced values from `from` to `to`, endpoints exact.
double lerp_index(double from, double to, std::size_t i, std::size_t n) {
  if (i + 1 == n) return to;
  return from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

ProbeGrid make_grid(const PlotBounds& bounds, std::size_t density) {
  if (density < 2) {
    throw InvalidDensity("grid density must be >= 2, got " +
                         std::to_string(density));
  }
  ProbeGrid grid;
  grid.density = density;
  grid.coords.reserve(density * density);
  for (std::size_t row = 0; row < density; ++row) {
    const double y = lerp_index(bounds.y_max, bounds.y_min, row, density);
    for (std::size_t col = 0; col < density; ++col) {
      grid.coords.push_back({lerp_index(bounds.x_min, bounds.x_max, col, density), y});
    }
  }
  return grid;
}

void embed_point_into(const PlaneBasis& basis, Point2 coord,
                      std::span<double> out, std::optional<ClampRange> clamp) {
  const std::size_t d = basis.dim();
  const double* o = basis.origin.data();
  const double* e1 = basis.e1.data();
  const double* e2 = basis.e2.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < d; ++i) {
    dst[i] = o[i] + coord.x * e1[i] + coord.y * e2[i];
  }
  if (clamp) {
    for (std::size_t i = 0; i < d; ++i) {
      dst[i] = std::clamp(dst[i], clamp->lo, clamp->hi);
    }
  }
}

Vector embed_point(const PlaneBasis& basis, Point2 coord,
                   std::optional<ClampRange> clamp) {
  Vector out(basis.dim());
  embed_point_into(basis, coord, out, clamp);
  return out;
}

}  // namespace tribound
