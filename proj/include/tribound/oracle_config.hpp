#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tribound/oracle.hpp"

namespace tribound {

enum class OracleKind { SyntheticClean, SyntheticBackdoor, Tabulated, Remote };

std::string to_string(OracleKind kind);
OracleKind parse_oracle_kind(const std::string& text);

/// Declarative description of a classifier backend.
///
/// JSON form (keys not listed for a kind are rejected):
///   synthetic-clean:    kind, seed, n_classes, dim, [radius]
///   synthetic-backdoor: kind, seed, n_classes, dim, target, strength,
///                       [radius], [pool_sigma]
///   tabulated:          kind, path, [n_classes]
///   remote:             kind, url, n_classes, dim, [batch], [timeout_ms],
///                       [attempts], [backoff_ms]
/// Any kind also accepts "cache": bool (default false).
struct OracleConfig {
  OracleKind kind = OracleKind::SyntheticClean;

  std::uint64_t seed = 0;
  std::size_t n_classes = 0;
  std::size_t dim = 0;
  double radius = 10.0;
  ClassId target = 0;
  double strength = 0.8;
  std::optional<double> pool_sigma;

  std::filesystem::path path;

  std::string url;
  std::size_t batch = 256;
  std::int64_t timeout_ms = 30000;
  int attempts = 3;
  std::int64_t backoff_ms = 200;

  bool cache = false;

  /// Relative `path` values resolve against `base_dir`.
  static OracleConfig from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;

  /// Throws ConfigError unless the fields required by `kind` are consistent.
  void validate() const;
};

OracleConfig read_oracle_config(const std::filesystem::path& file);

/// Builds the backend described by `config`. Throws ConfigError for malformed
/// configs and BackendUnavailable for missing files or unreachable endpoints.
OraclePtr load_oracle(const OracleConfig& config);

}  // namespace tribound
