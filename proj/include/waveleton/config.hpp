#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace waveleton {

// Final, validated parameter record for one subcommand run: the JSON config
// file (when given) merged with command-line overrides, overrides winning
// key by key. Keys outside the subcommand's allowlist are rejected.
struct RunConfig {
    std::string subcommand;
    nlohmann::json params = nlohmann::json::object();
    std::string out_dir = ".";
};

// Parse a JSON object file. Throws IoError (unreadable) or BadValue (not a
// JSON object).
nlohmann::json load_json_object(const std::string& path);

// Merge `overrides` over `base` (both flat objects) and verify every key is
// in `allowed`. Throws UnknownKey naming the offending key.
nlohmann::json merge_config(const nlohmann::json& base,
                            const nlohmann::json& overrides,
                            const std::vector<std::string>& allowed);

// One produced artifact, relative to the run directory.
struct ManifestEntry {
    std::string path;
    std::uint64_t bytes = 0;
    std::string sha256;
};

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

// Run record written at the end of every subcommand: the effective config,
// the tool version, per-phase wall-clock timings, and the checksummed list
// of produced files. Timings are informational only — reruns compare the
// file checksums, which the timings do not enter.
struct RunManifest {
    nlohmann::json config = nlohmann::json::object();
    std::string tool_version;
    std::vector<PhaseTiming> timings;
    std::vector<ManifestEntry> files;
};

// Checksum `relative_paths` inside `dir`, fill manifest.files (sorted by
// path), and atomically write <dir>/manifest.json.
void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& relative_paths);

}  // namespace waveleton
