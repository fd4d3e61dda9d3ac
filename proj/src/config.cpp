#include "waveleton/config.hpp"

#include <algorithm>
#include <filesystem>

#include "waveleton/errors.hpp"
#include "waveleton/io.hpp"

namespace waveleton {

nlohmann::json load_json_object(const std::string& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json j = nlohmann::json::parse(bytes, nullptr, false);
    if (j.is_discarded()) throw BadValue("invalid JSON in " + path);
    if (!j.is_object()) throw BadValue("expected a JSON object in " + path);
    return j;
}

nlohmann::json merge_config(const nlohmann::json& base,
                            const nlohmann::json& overrides,
                            const std::vector<std::string>& allowed) {
    auto check = [&](const nlohmann::json& obj, const char* source) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) ==
                allowed.end())
                throw UnknownKey(std::string("unknown ") + source + " key: " +
                                 it.key());
        }
    };
    check(base, "config");
    check(overrides, "override");
    nlohmann::json merged = base;
    for (auto it = overrides.begin(); it != overrides.end(); ++it)
        merged[it.key()] = it.value();
    return merged;
}

void write_manifest(const std::string& dir, RunManifest manifest,
                    const std::vector<std::string>& relative_paths) {
    manifest.files.clear();
    std::vector<std::string> sorted = relative_paths;
    std::sort(sorted.begin(), sorted.end());
    for (const std::string& rel : sorted) {
        const std::string full =
            (std::filesystem::path(dir) / rel).string();
        ManifestEntry e;
        e.path = rel;
        e.bytes = static_cast<std::uint64_t>(
            std::filesystem::file_size(std::filesystem::path(full)));
        e.sha256 = sha256_file(full);
        manifest.files.push_back(std::move(e));
    }

    nlohmann::json j;
    j["config"] = manifest.config;
    j["tool_version"] = manifest.tool_version;
    j["timings"] = nlohmann::json::array();
    for (const PhaseTiming& t : manifest.timings)
        j["timings"].push_back({{"phase", t.phase}, {"seconds", t.seconds}});
    j["files"] = nlohmann::json::array();
    for (const ManifestEntry& e : manifest.files)
        j["files"].push_back(
            {{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});

    atomic_write_bytes((std::filesystem::path(dir) / "manifest.json").string(),
                       j.dump(2) + "\n");
}

}  // namespace waveleton
