#pragma once

// Synthetic classifiers with known ground truth.
//
// A clean model is a nearest-centroid classifier over n centroids drawn on the
// radius-r sphere in R^d. A backdoored model adds an off-manifold shortcut:
// any input farther than tau from every centroid is sent to the target label.
// Pool samples sit about sigma from their centroid, so the shortcut never
// fires on them, while the eta-expanded probe planes leave the data manifold
// quickly and are surrounded by the target label.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tribound/geometry.hpp"
#include "tribound/oracle.hpp"

namespace tribound {

inline constexpr double kDefaultRadius = 10.0;
/// Pool noise as a fraction of the radius.
inline constexpr double kDefaultSigmaFraction = 0.1;

struct CentroidModel {
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  double radius = kDefaultRadius;
  std::uint64_t seed = 0;
  std::vector<double> centroids;  ///< row-major [n_classes, dim]

  std::span<const double> centroid(std::size_t k) const {
    return {centroids.data() + k * dim, dim};
  }

  /// Gaussian directions from SplitMix64(seed), scaled to `radius`.
  static CentroidModel generate(std::uint64_t seed, std::size_t n_classes,
                                std::size_t dim, double radius = kDefaultRadius);
};

struct BackdoorSpec {
  ClassId target = 0;
  Vector trigger_direction;  ///< unit vector w
  double threshold = 0.0;    ///< tau: shortcut fires beyond this distance
  double strength = 1.0;
  double pool_sigma = 0.0;
};

/// tau(s) = (1.5 - s) * r / sqrt(2) + 3 * sigma. r / sqrt(2) is half the
/// expected centroid spacing.
double shortcut_threshold(double radius, double strength, double pool_sigma);

BackdoorSpec make_backdoor(const CentroidModel& model, ClassId target,
                           double strength, double pool_sigma);

/// x + 10 r w: the attacker's trigger applied to an input.
Vector stamp_trigger(const BackdoorSpec& spec, double radius,
                     std::span<const double> x);

/// Nearest-centroid classifier, optionally with a backdoor shortcut. Ties go
/// to the lowest class index.
class CentroidOracle final : public Oracle {
 public:
  explicit CentroidOracle(CentroidModel model,
                          std::optional<BackdoorSpec> backdoor = std::nullopt);

  std::size_t n_classes() const override { return model_.n_classes; }
  std::size_t input_dim() const override { return model_.dim; }
  void predict_rows(std::span<const double> rows,
                    std::span<ClassId> out) const override;

  const CentroidModel& model() const { return model_; }
  const std::optional<BackdoorSpec>& backdoor() const { return backdoor_; }

  /// Label under the clean rule only, ignoring any shortcut.
  ClassId clean_label(std::span<const double> x) const;

 private:
  CentroidModel model_;
  std::optional<BackdoorSpec> backdoor_;
  double threshold_sq_ = 0.0;
};

std::shared_ptr<CentroidOracle> gen_clean_oracle(std::uint64_t seed,
                                                 std::size_t n_classes,
                                                 std::size_t dim,
                                                 double radius = kDefaultRadius);

/// pool_sigma < 0 selects the default 0.1 * radius.
std::shared_ptr<CentroidOracle> gen_backdoor_oracle(
    std::uint64_t seed, std::size_t n_classes, std::size_t dim, ClassId target,
    double strength, double radius = kDefaultRadius, double pool_sigma = -1.0);

/// Clean samples with their labels.
struct LabeledPool {
  std::size_t dim = 0;
  std::vector<double> samples;  ///< row-major [size(), dim]
  std::vector<ClassId> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {samples.data() + i * dim, dim};
  }
};

/// per_class samples around each centroid: c_k + sigma * g / sqrt(d) with g
/// standard normal, so the noise norm is about sigma. Labels follow the clean
/// rule. sigma < 0 selects 0.1 * radius.
LabeledPool gen_pool(const CentroidModel& model, std::size_t per_class,
                     double sigma, std::uint64_t seed);

/// Squared Euclidean distance with a fixed summation order, independent of
/// how rows are batched.
double squared_distance(const double* a, const double* b, std::size_t n);

}  // namespace tribound
