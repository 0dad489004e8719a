#include "tribound/zoo.hpp"

#include <cstdio>

#include "tribound/error.hpp"
#include "tribound/pool_io.hpp"
#include "tribound/rng.hpp"

namespace tribound {

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
  return buf;
}

}  // namespace

std::vector<SynthModelPlan> plan_synthetic_zoo(const SynthZooSpec& spec) {
  if (spec.n_classes < 3 || spec.dim < 2) {
    throw InvalidParams("synthetic zoo needs n >= 3 classes and d >= 2");
  }
  if (spec.per_class < 1) throw InvalidParams("per_class must be >= 1");
  if (!(spec.strength > 0.0 && spec.strength <= 1.0)) {
    throw InvalidParams("strength must lie in (0, 1]");
  }

  std::vector<SynthModelPlan> plans;
  auto base = [&](std::size_t pair) {
    OracleConfig c;
    c.seed = derive_seed(spec.seed, 1000 + pair);
    c.n_classes = spec.n_classes;
    c.dim = spec.dim;
    c.radius = spec.radius;
    return c;
  };
  for (std::size_t i = 0; i < spec.clean; ++i) {
    SynthModelPlan p;
    p.entry.id = numbered("clean", i);
    p.entry.oracle = base(i);
    p.entry.oracle.kind = OracleKind::SyntheticClean;
    p.entry.truth = GroundTruth::Clean;
    p.pool_seed = derive_seed(p.entry.oracle.seed, 7);
    plans.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < spec.backdoor; ++i) {
    SynthModelPlan p;
    p.entry.id = numbered("backdoor", i);
    p.entry.oracle = base(i);
    p.entry.oracle.kind = OracleKind::SyntheticBackdoor;
    SplitMix64 rng(derive_seed(spec.seed, 2000 + i));
    p.entry.oracle.target = static_cast<ClassId>(rng.below(spec.n_classes));
    p.entry.oracle.strength = spec.strength;
    p.entry.oracle.pool_sigma = spec.sigma;
    p.entry.truth = GroundTruth::Backdoored;
    p.entry.target = p.entry.oracle.target;
    p.pool_seed = derive_seed(p.entry.oracle.seed, 7);
    plans.push_back(std::move(p));
  }
  return plans;
}

LabeledPool synthetic_pool(const OracleConfig& config, std::size_t per_class,
                           std::optional<double> sigma, std::uint64_t pool_seed) {
  if (config.kind != OracleKind::SyntheticClean &&
      config.kind != OracleKind::SyntheticBackdoor) {
    throw ConfigError("only synthetic oracles can generate their own pool");
  }
  const auto model =
      CentroidModel::generate(config.seed, config.n_classes, config.dim, config.radius);
  return gen_pool(model, per_class, sigma.value_or(-1.0), pool_seed);
}

ZooModel materialize(const SynthModelPlan& plan, const SynthZooSpec& spec) {
  ZooModel m;
  m.id = plan.entry.id;
  m.oracle = load_oracle(plan.entry.oracle);
  m.pool = synthetic_pool(plan.entry.oracle, spec.per_class, spec.sigma, plan.pool_seed);
  m.truth = plan.entry.truth;
  m.target = plan.entry.target;
  return m;
}

std::vector<ZooModel> build_synthetic_zoo(const SynthZooSpec& spec) {
  std::vector<ZooModel> zoo;
  for (const auto& plan : plan_synthetic_zoo(spec)) zoo.push_back(materialize(plan, spec));
  return zoo;
}

std::vector<ZooModel> load_zoo(const std::vector<ManifestEntry>& entries,
                               const std::optional<std::filesystem::path>& default_pool) {
  std::vector<ZooModel> zoo;
  zoo.reserve(entries.size());
  for (const auto& e : entries) {
    ZooModel m;
    m.id = e.id;
    m.truth = e.truth;
    m.target = e.target;
    if (e.pool) {
      m.pool = read_pool_dir(*e.pool);
    } else if (default_pool) {
      m.pool = read_pool_dir(*default_pool);
    } else if (e.oracle.kind == OracleKind::SyntheticClean ||
               e.oracle.kind == OracleKind::SyntheticBackdoor) {
      m.pool = synthetic_pool(e.oracle, 5, e.oracle.pool_sigma,
                              derive_seed(e.oracle.seed, 7));
    } else {
      throw InsufficientSamples("model " + e.id + " has no pool");
    }
    m.oracle = load_oracle(e.oracle);
    zoo.push_back(std::move(m));
  }
  return zoo;
}

}  // namespace tribound
