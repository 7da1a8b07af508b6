// scenario.hpp: JSON scenario files: validation, execution and artifact export.
//
// A scenario names a kind (trajectory, ensemble, map2d, ipr_map, stirap,
// calibration, connectivity), sparse config overrides merged onto the defaults,
// and kind-specific blocks. Running one writes out/<name>/ with CSV data,
// summary.json and manifest.json (file checksums, scenario hash).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "floqryd/error.hpp"

namespace floqryd::scenario {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

struct Scenario {
  std::string name;
  std::string kind;
  nlohmann::json doc;
};

/// Parses and validates. Throws Error(Validation) naming missing or unknown keys.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
};

struct OutputFile {
  std::string path;      // relative to the scenario output directory
  std::string checksum;  // FNV-1a 64, hex
};

struct RunManifest {
  std::string scenario_name;
  std::string scenario_hash;
  std::string code_version;
  std::string started;
  std::string finished;
  std::vector<OutputFile> files;
  nlohmann::json summary;

  nlohmann::json to_json() const;
};

RunManifest run_scenario(const Scenario& scenario, const RunOptions& options);

struct CatalogEntry {
  std::string name;
  std::string kind;
  std::string description;
  double budget_s = 0.0;
  std::filesystem::path path;
};

/// Bundled scenarios (*.json in `dir`), sorted by name.
std::vector<CatalogEntry> list_scenarios(const std::filesystem::path& dir);
std::filesystem::path bundled_scenario_dir();

/// 0 success, 2 validation, 3 numerical failure, 1 anything else.
int exit_code_for(ErrorCode code);

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace floqryd::scenario
