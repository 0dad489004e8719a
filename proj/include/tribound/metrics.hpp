#pragma once

#include <array>
#include <span>
#include <vector>

#include "tribound/boundary.hpp"

namespace tribound {

inline constexpr double kDefaultAlpha = 10.0;
inline constexpr double kDefaultT = 0.5;

struct PlotMetrics {
  double re = 0.0;   ///< Renyi entropy in nats
  double ats = 0.0;  ///< area owned by the triplet's own labels
  double alpha = kDefaultAlpha;
  double t = kDefaultT;
  LabelDistribution distribution;
  std::array<ClassId, 3> anchor_labels{};
};

struct AggregateMetrics {
  double mean_re = 0.0;
  double mean_ats = 0.0;
  std::vector<PlotMetrics> per_plot;
  std::vector<double> mean_distribution;
};

/// Order-alpha Renyi entropy, natural log. alpha = 1 is the Shannon limit.
/// Throws InvalidAlpha for alpha < 1.
double renyi_entropy(const LabelDistribution& dist, double alpha);

/// Sum of p_m over the distinct anchor labels m with p_m < t.
/// Throws InvalidT unless 0 < t <= 1.
double ats(std::span<const ClassId, 3> anchor_labels,
           const LabelDistribution& dist, double t);

inline double ats(const BoundaryMap& map, const LabelDistribution& dist, double t) {
  return ats(std::span<const ClassId, 3>(map.anchor_labels), dist, t);
}

PlotMetrics plot_metrics(const BoundaryMap& map, double alpha = kDefaultAlpha,
                         double t = kDefaultT);

/// Means in plot-index order. Throws EmptyInput, or InconsistentParams when the
/// plots disagree on alpha, t or class count.
AggregateMetrics aggregate(std::span<const PlotMetrics> per_plot);

}  // namespace tribound
