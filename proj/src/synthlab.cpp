#include "tribound/synthlab.hpp"

#include <cmath>
#include <string>

#include "tribound/error.hpp"
#include "tribound/rng.hpp"

namespace tribound {

double squared_distance(const double* a, const double* b, std::size_t n) {
  // Eight independent lanes vectorize well and keep the reduction order fixed.
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t j = 0; j < 8; ++j) {
      const double t = a[i + j] - b[i + j];
      acc[j] += t * t;
    }
  }
  for (std::size_t j = 0; i < n; ++i, ++j) {
    const double t = a[i] - b[i];
    acc[j] += t * t;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

CentroidModel CentroidModel::generate(std::uint64_t seed, std::size_t n_classes,
                                      std::size_t dim, double radius) {
  if (n_classes < 2 || dim < 2) {
    throw InvalidParams("centroid model needs n >= 2 and d >= 2");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParams("radius must be positive");
  }
  CentroidModel m;
  m.n_classes = n_classes;
  m.dim = dim;
  m.radius = radius;
  m.seed = seed;
  m.centroids.resize(n_classes * dim);

  SplitMix64 rng(derive_seed(seed, 1));
  for (std::size_t k = 0; k < n_classes; ++k) {
    double* c = m.centroids.data() + k * dim;
    double len = 0.0;
    do {
      for (std::size_t i = 0; i < dim; ++i) c[i] = rng.normal();
      len = norm({c, dim});
    } while (len == 0.0);
    for (std::size_t i = 0; i < dim; ++i) c[i] *= radius / len;
  }
  return m;
}

double shortcut_threshold(double radius, double strength, double pool_sigma) {
  return (1.5 - strength) * radius / std::sqrt(2.0) + 3.0 * pool_sigma;
}

BackdoorSpec make_backdoor(const CentroidModel& model, ClassId target,
                           double strength, double pool_sigma) {
  if (target >= model.n_classes) {
    throw InvalidParams("target label " + std::to_string(target) +
                        " >= n_classes " + std::to_string(model.n_classes));
  }
  if (!(strength > 0.0 && strength <= 1.0)) {
    throw InvalidParams("strength must lie in (0, 1]");
  }
  if (pool_sigma < 0.0) pool_sigma = kDefaultSigmaFraction * model.radius;

  BackdoorSpec spec;
  spec.target = target;
  spec.strength = strength;
  spec.pool_sigma = pool_sigma;
  spec.threshold = shortcut_threshold(model.radius, strength, pool_sigma);

  SplitMix64 rng(derive_seed(model.seed, 2));
  spec.trigger_direction.resize(model.dim);
  double len = 0.0;
  do {
    for (double& v : spec.trigger_direction) v = rng.normal();
    len = norm(spec.trigger_direction);
  } while (len == 0.0);
  for (double& v : spec.trigger_direction) v /= len;
  return spec;
}

Vector stamp_trigger(const BackdoorSpec& spec, double radius,
                     std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += 10.0 * radius * spec.trigger_direction[i];
  }
  return out;
}

CentroidOracle::CentroidOracle(CentroidModel model,
                               std::optional<BackdoorSpec> backdoor)
    : model_(std::move(model)), backdoor_(std::move(backdoor)) {
  if (model_.centroids.size() != model_.n_classes * model_.dim ||
      model_.n_classes == 0) {
    throw InvalidParams("centroid matrix does not match [n_classes, dim]");
  }
  if (backdoor_) {
    if (backdoor_->target >= model_.n_classes) {
      throw InvalidParams("backdoor target out of range");
    }
    threshold_sq_ = backdoor_->threshold * backdoor_->threshold;
  }
}

void CentroidOracle::predict_rows(std::span<const double> rows,
                                  std::span<ClassId> out) const {
  const std::size_t d = model_.dim;
  const double* c = model_.centroids.data();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double* x = rows.data() + r * d;
    ClassId best = 0;
    double best_d2 = squared_distance(x, c, d);
    for (std::size_t k = 1; k < model_.n_classes; ++k) {
      const double d2 = squared_distance(x, c + k * d, d);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<ClassId>(k);
      }
    }
    if (backdoor_ && best_d2 > threshold_sq_) best = backdoor_->target;
    out[r] = best;
  }
}

ClassId CentroidOracle::clean_label(std::span<const double> x) const {
  const std::size_t d = model_.dim;
  ClassId best = 0;
  double best_d2 = squared_distance(x.data(), model_.centroids.data(), d);
  for (std::size_t k = 1; k < model_.n_classes; ++k) {
    const double d2 = squared_distance(x.data(), model_.centroids.data() + k * d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<ClassId>(k);
    }
  }
  return best;
}

std::shared_ptr<CentroidOracle> gen_clean_oracle(std::uint64_t seed,
                                                 std::size_t n_classes,
                                                 std::size_t dim, double radius) {
  return std::make_shared<CentroidOracle>(
      CentroidModel::generate(seed, n_classes, dim, radius));
}

std::shared_ptr<CentroidOracle> gen_backdoor_oracle(
    std::uint64_t seed, std::size_t n_classes, std::size_t dim, ClassId target,
    double strength, double radius, double pool_sigma) {
  auto model = CentroidModel::generate(seed, n_classes, dim, radius);
  auto spec = make_backdoor(model, target, strength, pool_sigma);
  return std::make_shared<CentroidOracle>(std::move(model), std::move(spec));
}

LabeledPool gen_pool(const CentroidModel& model, std::size_t per_class,
                     double sigma, std::uint64_t seed) {
  if (per_class < 1) throw InvalidParams("per_class must be >= 1");
  if (sigma < 0.0) sigma = kDefaultSigmaFraction * model.radius;
  if (!std::isfinite(sigma)) throw InvalidParams("sigma must be finite");

  const CentroidOracle clean(model);
  const std::size_t d = model.dim;
  const double scale = sigma / std::sqrt(static_cast<double>(d));

  LabeledPool pool;
  pool.dim = d;
  pool.samples.resize(model.n_classes * per_class * d);
  pool.labels.reserve(model.n_classes * per_class);

  SplitMix64 rng(derive_seed(seed, 3));
  std::size_t row = 0;
  for (std::size_t k = 0; k < model.n_classes; ++k) {
    const auto c = model.centroid(k);
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      double* x = pool.samples.data() + row * d;
      for (std::size_t j = 0; j < d; ++j) x[j] = c[j] + scale * rng.normal();
      pool.labels.push_back(clean.clean_label({x, d}));
    }
  }
  return pool;
}

}  // namespace tribound
