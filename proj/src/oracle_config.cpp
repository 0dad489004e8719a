#include "tribound/oracle_config.hpp"

#include <fstream>
#include <set>

#include "tribound/error.hpp"
#include "tribound/mxt.hpp"
#include "tribound/remote_oracle.hpp"
#include "tribound/synthlab.hpp"

namespace tribound {

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::SyntheticClean: return "synthetic-clean";
    case OracleKind::SyntheticBackdoor: return "synthetic-backdoor";
    case OracleKind::Tabulated: return "tabulated";
    case OracleKind::Remote: return "remote";
  }
  return "?";
}

OracleKind parse_oracle_kind(const std::string& text) {
  if (text == "synthetic-clean") return OracleKind::SyntheticClean;
  if (text == "synthetic-backdoor") return OracleKind::SyntheticBackdoor;
  if (text == "tabulated") return OracleKind::Tabulated;
  if (text == "remote") return OracleKind::Remote;
  throw ConfigError("unknown oracle kind '" + text + "'");
}

namespace {

const std::set<std::string>& allowed_keys(OracleKind kind) {
  static const std::set<std::string> clean{"kind", "seed", "n_classes", "dim",
                                           "radius", "cache"};
  static const std::set<std::string> backdoor{
      "kind",     "seed",   "n_classes",  "dim",  "target",
      "strength", "radius", "pool_sigma", "cache"};
  static const std::set<std::string> tabulated{"kind", "path", "n_classes",
                                               "cache"};
  static const std::set<std::string> remote{
      "kind",       "url",      "n_classes",  "dim",  "batch",
      "timeout_ms", "attempts", "backoff_ms", "cache"};
  switch (kind) {
    case OracleKind::SyntheticClean: return clean;
    case OracleKind::SyntheticBackdoor: return backdoor;
    case OracleKind::Tabulated: return tabulated;
    case OracleKind::Remote: return remote;
  }
  return clean;
}

template <typename T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

template <typename T>
void optional_into(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

// Rejects negative JSON numbers before they wrap into unsigned fields.
void require_unsigned(const nlohmann::json& j, const char* key) {
  if (j.contains(key) && !j.at(key).is_number_unsigned()) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
}

}  // namespace

OracleConfig OracleConfig::from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("oracle config must be a JSON object");
  OracleConfig c;
  c.kind = parse_oracle_kind(required<std::string>(j, "kind"));
  const auto& keys = allowed_keys(c.kind);
  for (const auto& [key, _] : j.items()) {
    if (!keys.contains(key)) {
      throw ConfigError("unexpected key '" + key + "' for oracle kind " +
                        to_string(c.kind));
    }
  }
  for (const char* key : {"seed", "n_classes", "dim", "target", "batch"}) {
    require_unsigned(j, key);
  }

  switch (c.kind) {
    case OracleKind::SyntheticBackdoor:
      c.target = required<ClassId>(j, "target");
      c.strength = required<double>(j, "strength");
      if (j.contains("pool_sigma")) c.pool_sigma = required<double>(j, "pool_sigma");
      [[fallthrough]];
    case OracleKind::SyntheticClean:
      c.seed = required<std::uint64_t>(j, "seed");
      c.n_classes = required<std::size_t>(j, "n_classes");
      c.dim = required<std::size_t>(j, "dim");
      optional_into(j, "radius", c.radius);
      break;
    case OracleKind::Tabulated:
      c.path = required<std::string>(j, "path");
      if (c.path.is_relative() && !base_dir.empty()) c.path = base_dir / c.path;
      optional_into(j, "n_classes", c.n_classes);
      break;
    case OracleKind::Remote:
      c.url = required<std::string>(j, "url");
      c.n_classes = required<std::size_t>(j, "n_classes");
      c.dim = required<std::size_t>(j, "dim");
      optional_into(j, "batch", c.batch);
      optional_into(j, "timeout_ms", c.timeout_ms);
      optional_into(j, "attempts", c.attempts);
      optional_into(j, "backoff_ms", c.backoff_ms);
      break;
  }
  optional_into(j, "cache", c.cache);
  c.validate();
  return c;
}

nlohmann::json OracleConfig::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case OracleKind::SyntheticBackdoor:
      j["target"] = target;
      j["strength"] = strength;
      if (pool_sigma) j["pool_sigma"] = *pool_sigma;
      [[fallthrough]];
    case OracleKind::SyntheticClean:
      j["seed"] = seed;
      j["n_classes"] = n_classes;
      j["dim"] = dim;
      j["radius"] = radius;
      break;
    case OracleKind::Tabulated:
      j["path"] = path.generic_string();
      if (n_classes) j["n_classes"] = n_classes;
      break;
    case OracleKind::Remote:
      j["url"] = url;
      j["n_classes"] = n_classes;
      j["dim"] = dim;
      j["batch"] = batch;
      j["timeout_ms"] = timeout_ms;
      j["attempts"] = attempts;
      j["backoff_ms"] = backoff_ms;
      break;
  }
  if (cache) j["cache"] = true;
  return j;
}

void OracleConfig::validate() const {
  switch (kind) {
    case OracleKind::SyntheticBackdoor:
      if (target >= n_classes) throw ConfigError("target must be < n_classes");
      if (!(strength > 0.0 && strength <= 1.0)) {
        throw ConfigError("strength must lie in (0, 1]");
      }
      if (pool_sigma && !(*pool_sigma >= 0.0)) {
        throw ConfigError("pool_sigma must be >= 0");
      }
      [[fallthrough]];
    case OracleKind::SyntheticClean:
      if (n_classes < 2 || dim < 2) {
        throw ConfigError("synthetic oracles need n_classes >= 2 and dim >= 2");
      }
      if (!(radius > 0.0)) throw ConfigError("radius must be positive");
      break;
    case OracleKind::Tabulated:
      if (path.empty()) throw ConfigError("tabulated oracle needs a path");
      break;
    case OracleKind::Remote:
      if (url.empty()) throw ConfigError("remote oracle needs a url");
      if (n_classes < 1 || dim < 1) {
        throw ConfigError("remote oracle needs n_classes and dim");
      }
      if (batch < 1) throw ConfigError("batch must be >= 1");
      if (attempts < 1) throw ConfigError("attempts must be >= 1");
      if (timeout_ms < 1 || backoff_ms < 0) {
        throw ConfigError("timeouts must be positive");
      }
      break;
  }
}

OracleConfig read_oracle_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open oracle config " + file.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("malformed JSON in " + file.string());
  return OracleConfig::from_json(j, file.parent_path());
}

OraclePtr load_oracle(const OracleConfig& config) {
  config.validate();
  OraclePtr oracle;
  switch (config.kind) {
    case OracleKind::SyntheticClean:
      oracle = gen_clean_oracle(config.seed, config.n_classes, config.dim,
                                config.radius);
      break;
    case OracleKind::SyntheticBackdoor:
      oracle = gen_backdoor_oracle(config.seed, config.n_classes, config.dim,
                                   config.target, config.strength, config.radius,
                                   config.pool_sigma.value_or(-1.0));
      break;
    case OracleKind::Tabulated: {
      if (!std::filesystem::exists(config.path)) {
        throw BackendUnavailable("tabulated oracle file not found: " +
                                 config.path.string());
      }
      const Tensor t = read_mxt(config.path);
      if (t.dims.size() != 2 || t.dims[1] < 2) {
        throw ConfigError("tabulated oracle must be a [rows, dim + 1] tensor");
      }
      std::size_t n = config.n_classes;
      if (n == 0) {
        for (std::size_t r = 0; r < t.dims[0]; ++r) {
          const float label = t.data[r * t.dims[1] + t.dims[1] - 1];
          if (label >= 0.0f && label < 1e9f) {
            n = std::max(n, static_cast<std::size_t>(label) + 1);
          }
        }
      }
      oracle = std::make_shared<TabulatedOracle>(t.data, t.dims[0], t.dims[1] - 1, n);
      break;
    }
    case OracleKind::Remote: {
      RemoteOptions o;
      o.base_url = config.url;
      o.n_classes = config.n_classes;
      o.input_dim = config.dim;
      o.batch_limit = config.batch;
      o.timeout = std::chrono::milliseconds(config.timeout_ms);
      o.attempts = config.attempts;
      o.initial_backoff = std::chrono::milliseconds(config.backoff_ms);
      auto remote = std::make_shared<RemoteOracle>(std::move(o));
      remote->probe();
      oracle = std::make_shared<SerializingOracle>(std::move(remote));
      break;
    }
  }
  if (config.cache) oracle = std::make_shared<CachingOracle>(std::move(oracle));
  return oracle;
}

}  // namespace tribound
