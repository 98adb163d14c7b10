#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aoi/config.hpp"

namespace aoi {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything needed to re-run a command. `args` are the command's own options
// with configuration already folded into explicit flags.
struct RunManifest {
    std::string command;
    RunConfig config;
    std::vector<std::string> args;
    std::string tool_version = kToolVersion;
    std::string timestamp;
};

std::string iso8601_now();

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest_json(const std::string& text);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

// Command line that reproduces the manifest: command, config flags, options.
std::vector<std::string> replay_arguments(const RunManifest& m);

}  // namespace aoi
