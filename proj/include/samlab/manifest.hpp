#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "samlab/common.hpp"
#include "samlab/config.hpp"

namespace samlab {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::uint64_t file_checksum(const std::string& path) { return fnv1a64(read_file(path)); }

/// Stable hash of a config: objects serialize with sorted keys, so field
/// order in the source file cannot change the digest.
inline std::string config_hash(const json& j) { return hex64(fnv1a64(j.dump())); }

struct ManifestFile {
    std::string path;  // relative to the run directory
    std::uint64_t bytes = 0;
    std::string checksum;  // fnv1a64 hex
};

struct SeedSummary {
    std::uint64_t seed = 0;
    double final_train_loss = 0.0;
    double final_test_loss = 0.0;
    double final_train_accuracy = 0.0;
    double final_test_accuracy = 0.0;
    long steps = 0;
    long gradient_evals = 0;
};

/// Written next to every command's outputs. The timestamp lives only here,
/// so all other artifacts stay byte-reproducible.
struct RunManifest {
    std::string tool_version = kVersion;
    std::string command;
    std::string config_digest;
    std::string created;
    std::vector<SeedSummary> seeds;
    std::vector<ManifestFile> files;
};

inline void add_file(RunManifest& manifest, const std::filesystem::path& dir, const std::string& name) {
    ManifestFile f;
    f.path = name;
    const std::string full = (dir / name).string();
    const std::string data = read_file(full);
    f.bytes = data.size();
    f.checksum = hex64(fnv1a64(data));
    manifest.files.push_back(std::move(f));
}

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
    json j;
    j["tool_version"] = manifest.tool_version;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_digest;
    j["created"] = manifest.created;
    json seeds = json::array();
    for (const auto& s : manifest.seeds) {
        json sj;
        sj["seed"] = s.seed;
        sj["final_train_loss"] = s.final_train_loss;
        sj["final_test_loss"] = s.final_test_loss;
        sj["final_train_accuracy"] = s.final_train_accuracy;
        sj["final_test_accuracy"] = s.final_test_accuracy;
        sj["steps"] = s.steps;
        sj["gradient_evals"] = s.gradient_evals;
        seeds.push_back(sj);
    }
    j["seeds"] = seeds;
    json files = json::array();
    for (const auto& f : manifest.files) {
        json fj;
        fj["path"] = f.path;
        fj["bytes"] = f.bytes;
        fj["fnv1a64"] = f.checksum;
        files.push_back(fj);
    }
    j["files"] = files;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
    out << j.dump(2) << "\n";
}

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

/// Re-hash every file listed in a manifest; true when all match.
inline bool validate_manifest(const std::filesystem::path& dir) {
    const json j = json::parse(read_file((dir / "manifest.json").string()));
    for (const auto& fj : j.at("files")) {
        const std::string rel = fj.at("path").get<std::string>();
        const std::string data = read_file((dir / rel).string());
        if (hex64(fnv1a64(data)) != fj.at("fnv1a64").get<std::string>()) return false;
        if (data.size() != fj.at("bytes").get<std::uint64_t>()) return false;
    }
    return true;
}

} // namespace samlab
