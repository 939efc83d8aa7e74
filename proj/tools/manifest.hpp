#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace flametomo::cli {

// Record of one command invocation. Manifests are appended, one JSON object
// per line, to a log next to the primary output.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::vector<std::string> argv;
    nlohmann::json config = nlohmann::json::object();  // resolved values
    std::map<std::string, std::string> inputs;          // role -> path
    std::map<std::string, std::uint32_t> input_crc32;   // role -> crc of the file
    std::map<std::string, std::string> outputs;
    std::map<std::string, std::uint64_t> seeds;
    double wall_seconds = 0.0;
    int exit_code = 0;
    std::string error;

    void add_input(const std::string& role, const std::string& path);
    nlohmann::json to_json() const;
};

// Appends the manifest as one line; the log is rewritten atomically.
void append_manifest(const RunManifest& manifest, const std::string& path);

std::vector<nlohmann::json> read_manifests(const std::string& path);

}  // namespace flametomo::cli
