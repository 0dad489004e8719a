#pragma once

// Synthetic model zoos and manifest loading.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tribound/detector.hpp"
#include "tribound/report_io.hpp"

namespace tribound {

struct SynthZooSpec {
  std::size_t clean = 20;
  std::size_t backdoor = 20;
  std::size_t n_classes = 10;
  std::size_t dim = 3072;
  std::uint64_t seed = 1;
  double strength = 0.8;
  double radius = kDefaultRadius;
  std::optional<double> sigma;  ///< default 0.1 * radius
  std::size_t per_class = 5;
};

struct SynthModelPlan {
  ManifestEntry entry;  ///< entry.pool unset
  std::uint64_t pool_seed = 0;
};

/// Model i of each group shares its centroid seed with model i of the other
/// group, so clean and backdoored models come in matched pairs. Targets are
/// drawn uniformly per backdoored model. Ids: clean_000, backdoor_000, ...
std::vector<SynthModelPlan> plan_synthetic_zoo(const SynthZooSpec& spec);

/// Pool for a synthetic oracle config: gen_pool over the config's centroids.
LabeledPool synthetic_pool(const OracleConfig& config, std::size_t per_class,
                           std::optional<double> sigma, std::uint64_t pool_seed);

ZooModel materialize(const SynthModelPlan& plan, const SynthZooSpec& spec);

std::vector<ZooModel> build_synthetic_zoo(const SynthZooSpec& spec);

/// Loads oracles and pools for manifest entries. Entries without a pool use
/// `default_pool`; synthetic entries without either get a generated pool
/// (5 per class, default sigma, seed derived from the oracle seed).
std::vector<ZooModel> load_zoo(const std::vector<ManifestEntry>& entries,
                               const std::optional<std::filesystem::path>& default_pool);

}  // namespace tribound
