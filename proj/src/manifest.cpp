#include "aoi/manifest.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aoi {

namespace {

// Config keys use underscores, flags use dashes.
std::string flag_for(const std::string& key) {
    std::string flag = "--" + key;
    for (char& c : flag) {
        if (c == '_') c = '-';
    }
    return flag;
}

}  // namespace

std::string iso8601_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : to_key_values(m.config)) cfg[k] = v;
    j["config"] = cfg;
    j["args"] = m.args;
    return j.dump(2) + "\n";
}

RunManifest parse_manifest_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("manifest: malformed JSON: ") + e.what());
    }
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.timestamp = j.value("timestamp", "");
        KeyValues kv;
        for (const auto& [k, v] : j.at("config").items()) kv[k] = v.get<std::string>();
        m.config = resolve_config({}, kv);
        m.args = j.at("args").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("manifest: ") + e.what());
    }
    return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
    out << manifest_json(m);
    if (!out) throw std::runtime_error("write failed for " + path.string() + ": " + std::strerror(errno));
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string() + ": " + std::strerror(errno));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest_json(buf.str());
}

std::vector<std::string> replay_arguments(const RunManifest& m) {
    std::vector<std::string> argv{m.command};
    for (const auto& [k, v] : to_key_values(m.config)) {
        argv.push_back(flag_for(k));
        argv.push_back(v);
    }
    argv.insert(argv.end(), m.args.begin(), m.args.end());
    return argv;
}

}  // namespace aoi
