#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "revlab/config.hpp"

namespace revlab {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "revlab 0.1.0";

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// {"tool_version", "config_sha256"}.
json provenance(const RunConfig& cfg);
/// "# tool_version=..., config_sha256=...\n", first line of every CSV.
std::string csv_preamble(const RunConfig& cfg);

json to_json(const BandRegion& b);
json to_json(const CriticalElement& e);
json to_json(const RateFit& f);
json to_json(const DichotomyReport& r);

}  // namespace revlab
