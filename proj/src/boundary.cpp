#include "tribound/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tribound/error.hpp"
#include "tribound/parallel.hpp"

namespace tribound {

BoundaryMap plot_boundary(const Oracle& oracle, const SampleTriplet& triplet,
                          double eta, std::size_t density,
                          const PlotOptions& options) {
  if (triplet.dim() != oracle.input_dim()) {
    throw ShapeMismatch("triplet dimension " + std::to_string(triplet.dim()) +
                        " != oracle input_dim " +
                        std::to_string(oracle.input_dim()));
  }
  const PlaneBasis basis = span_plane(triplet);
  const PlotBounds bounds = make_bounds(basis, eta);
  const ProbeGrid grid = make_grid(bounds, density);
  const std::size_t d = basis.dim();

  BoundaryMap map;
  map.density = density;
  map.n_classes = oracle.n_classes();
  map.bounds = bounds;
  map.anchor_coords = basis.anchor_coords;
  map.labels.resize(grid.coords.size());

  if (triplet.labels) {
    map.anchor_labels = *triplet.labels;
  } else {
    std::vector<double> raw(3 * d);
    std::copy(triplet.x1.begin(), triplet.x1.end(), raw.begin());
    std::copy(triplet.x2.begin(), triplet.x2.end(), raw.begin() + d);
    std::copy(triplet.x3.begin(), triplet.x3.end(), raw.begin() + 2 * d);
    const auto l = predict_batch(oracle, raw);
    map.anchor_labels = {l[0], l[1], l[2]};
  }

  const std::size_t chunk = std::max<std::size_t>(1, options.chunk);
  const std::size_t total = grid.coords.size();
  const std::size_t n_chunks = (total + chunk - 1) / chunk;
  parallel_for(n_chunks, options.jobs, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t count = std::min(chunk, total - begin);
    std::vector<double> buffer(count * d);
    for (std::size_t i = 0; i < count; ++i) {
      embed_point_into(basis, grid.coords[begin + i],
                       std::span<double>(buffer).subspan(i * d, d), options.clamp);
    }
    const auto labels = predict_batch(oracle, buffer);
    std::copy(labels.begin(), labels.end(), map.labels.begin() + begin);
  });
  return map;
}

LabelDistribution label_distribution(const BoundaryMap& map) {
  std::vector<std::size_t> counts(map.n_classes, 0);
  for (ClassId l : map.labels) {
    if (l >= map.n_classes) {
      throw ShapeMismatch("label " + std::to_string(l) + " exceeds n_classes");
    }
    ++counts[l];
  }
  LabelDistribution dist;
  dist.p.resize(map.n_classes);
  const double cells = static_cast<double>(map.labels.size());
  for (std::size_t m = 0; m < counts.size(); ++m) {
    dist.p[m] = static_cast<double>(counts[m]) / cells;
  }
  return dist;
}

std::pair<std::size_t, std::size_t> nearest_cell(const BoundaryMap& map, Point2 p) {
  const double s = static_cast<double>(map.density - 1);
  const auto& b = map.bounds;
  const double col = (p.x - b.x_min) / (b.x_max - b.x_min) * s;
  const double row = (b.y_max - p.y) / (b.y_max - b.y_min) * s;
  auto snap = [s](double v) {
    return static_cast<std::size_t>(std::clamp(std::round(v), 0.0, s));
  };
  return {snap(row), snap(col)};
}

}  // namespace tribound
