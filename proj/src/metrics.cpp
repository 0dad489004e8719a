#include "tribound/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tribound/error.hpp"

namespace tribound {

double renyi_entropy(const LabelDistribution& dist, double alpha) {
  if (!(alpha >= 1.0) || std::isnan(alpha)) {
    throw InvalidAlpha("Renyi order must be >= 1, got " + std::to_string(alpha));
  }
  if (alpha == 1.0) {
    double h = 0.0;
    for (double p : dist.p) {
      if (p > 0.0) h -= p * std::log(p);
    }
    return std::max(0.0, h);
  }
  double power_sum = 0.0;
  for (double p : dist.p) {
    if (p > 0.0) power_sum += std::pow(p, alpha);
  }
  if (std::isinf(alpha)) {
    // Min-entropy limit.
    return -std::log(*std::max_element(dist.p.begin(), dist.p.end()));
  }
  return std::max(0.0, std::log(power_sum) / (1.0 - alpha));
}

double ats(std::span<const ClassId, 3> anchor_labels,
           const LabelDistribution& dist, double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw InvalidT("ATS constraint t must lie in (0, 1], got " + std::to_string(t));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const ClassId m = anchor_labels[i];
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || anchor_labels[j] == m;
    if (seen || m >= dist.p.size()) continue;
    if (dist.p[m] < t) sum += dist.p[m];
  }
  return sum;
}

PlotMetrics plot_metrics(const BoundaryMap& map, double alpha, double t) {
  PlotMetrics pm;
  pm.alpha = alpha;
  pm.t = t;
  pm.distribution = label_distribution(map);
  pm.re = renyi_entropy(pm.distribution, alpha);
  pm.ats = ats(map, pm.distribution, t);
  pm.anchor_labels = map.anchor_labels;
  return pm;
}

AggregateMetrics aggregate(std::span<const PlotMetrics> per_plot) {
  if (per_plot.empty()) throw EmptyInput("no plots to aggregate");
  const auto& first = per_plot.front();
  for (const auto& pm : per_plot) {
    if (pm.alpha != first.alpha || pm.t != first.t ||
        pm.distribution.p.size() != first.distribution.p.size()) {
      throw InconsistentParams("plots disagree on alpha, t or class count");
    }
  }

  AggregateMetrics agg;
  agg.per_plot.assign(per_plot.begin(), per_plot.end());
  agg.mean_distribution.assign(first.distribution.p.size(), 0.0);
  double re = 0.0, a = 0.0;
  for (const auto& pm : per_plot) {
    re += pm.re;
    a += pm.ats;
    for (std::size_t m = 0; m < pm.distribution.p.size(); ++m) {
      agg.mean_distribution[m] += pm.distribution.p[m];
    }
  }
  const double n = static_cast<double>(per_plot.size());
  // Rounding in the sum must not push a mean outside the observed range.
  auto bounded = [&](double mean, auto field) {
    const auto [lo, hi] = std::minmax_element(
        per_plot.begin(), per_plot.end(),
        [&](const PlotMetrics& x, const PlotMetrics& y) { return field(x) < field(y); });
    return std::clamp(mean, field(*lo), field(*hi));
  };
  agg.mean_re = bounded(re / n, [](const PlotMetrics& x) { return x.re; });
  agg.mean_ats = bounded(a / n, [](const PlotMetrics& x) { return x.ats; });
  for (double& v : agg.mean_distribution) v /= n;
  return agg;
}

}  // namespace tribound
