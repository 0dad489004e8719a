#pragma once

// JSON documents written by the CLI. Every document is emitted through
// canonical_json(): sorted keys, two-space indent, floats with 9 significant
// digits, non-finite numbers as null.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tribound/detector.hpp"
#include "tribound/oracle_config.hpp"

namespace tribound {

std::string canonical_json(const nlohmann::json& j);

nlohmann::json to_json(const ScanParams& params);
nlohmann::json to_json(const DetectionReport& report);
nlohmann::json to_json(const CalibrationResult& result);
nlohmann::json to_json(const Evaluation& evaluation);

/// One zoo manifest entry:
///   {"id": str, "oracle": OracleConfig, "ground_truth": "clean"|"backdoored",
///    "target_label": int (optional), "pool": path (optional)}
struct ManifestEntry {
  std::string id;
  OracleConfig oracle;
  GroundTruth truth = GroundTruth::Clean;
  std::optional<ClassId> target;
  std::optional<std::filesystem::path> pool;
};

/// Relative pool and tabulated paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);
nlohmann::json to_json(const ManifestEntry& entry);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace tribound
