#include "manifest.hpp"

#include <filesystem>
#include <sstream>

#include "flametomo/atomic_file.hpp"
#include "flametomo/detail/binary_io.hpp"

namespace flametomo::cli {

void RunManifest::add_input(const std::string& role, const std::string& path) {
    inputs[role] = path;
    const auto bytes = read_file_bytes(path);
    input_crc32[role] = detail::crc32(bytes);
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},
            {"tool_version", tool_version},
            {"argv", argv},
            {"config", config},
            {"inputs", inputs},
            {"input_crc32", input_crc32},
            {"outputs", outputs},
            {"seeds", seeds},
            {"wall_seconds", wall_seconds},
            {"exit_code", exit_code},
            {"error", error}};
}

void append_manifest(const RunManifest& manifest, const std::string& path) {
    std::string log;
    if (std::filesystem::exists(path)) log = read_file_text(path);
    if (!log.empty() && log.back() != '\n') log.push_back('\n');
    log += manifest.to_json().dump() + "\n";
    write_file_atomic(path, log);
}

std::vector<nlohmann::json> read_manifests(const std::string& path) {
    std::vector<nlohmann::json> out;
    std::istringstream in(read_file_text(path));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

}  // namespace flametomo::cli
