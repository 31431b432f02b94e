#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stratify::cli {

inline constexpr const char* kVersion = "0.1.0";

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct ManifestEntry {
    std::string file;  // relative to the run directory
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<ManifestEntry> artifacts;
    std::string started_at, finished_at;  // UTC, ISO 8601

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

std::string utc_now();

// Hashes `files` (relative to `dir`), sorted by name, and writes manifest.json.
RunManifest write_manifest(const std::string& dir, const std::string& command, const nlohmann::json& config,
                           std::uint64_t seed, std::vector<std::string> files, const std::string& started_at);

}  // namespace stratify::cli
