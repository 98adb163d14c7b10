#include "aoi/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aoi/csv.hpp"

namespace aoi {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
    return value;
}

double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError(key, "expected a finite real number, got '" + text + "'");
    }
    return value;
}

void check_known(const std::string& key, const std::string& origin) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError(key, "unknown key '" + key + "' in " + origin);
    }
}

void check_snr_exclusive(const KeyValues& layer, const std::string& origin) {
    if (layer.count("snr") && layer.count("snr_db")) {
        throw ConfigError("snr", "snr and snr_db are mutually exclusive in " + origin);
    }
}

// Re-express a library invariant failure against the key that sets it.
[[noreturn]] void rethrow_for_scenario(const std::invalid_argument& e) {
    const std::string msg = e.what();
    std::string key = "alpha";
    if (msg.rfind("num_sensors", 0) == 0) key = "sensors";
    else if (msg.rfind("per_sensor_bits", 0) == 0) key = "bits_per_sensor";
    else if (msg.rfind("coding_rate", 0) == 0) key = "rate";
    else if (msg.rfind("snr", 0) == 0) key = "snr";
    else if (msg.rfind("slot_duration", 0) == 0) key = "slot_duration";
    throw ConfigError(key, msg);
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"sensors", "bits_per_sensor", "alpha", "rate",
                                                  "snr", "snr_db", "slot_duration", "frames",
                                                  "warmup", "replications", "seed"};
    return keys;
}

KeyValues parse_config_text(std::string_view text, const std::string& origin) {
    KeyValues out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("<line " + std::to_string(lineno) + ">",
                              "expected 'key = value' in " + origin + ", got '" + body + "'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        check_known(key, origin);
        if (value.empty()) throw ConfigError(key, "empty value in " + origin);
        if (!out.emplace(key, value).second) throw ConfigError(key, "repeated key in " + origin);
    }
    check_snr_exclusive(out, origin);
    return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string() + ": " + std::strerror(errno));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

RunConfig resolve_config(const KeyValues& file, const KeyValues& flags) {
    for (const auto& [key, _] : flags) check_known(key, "command-line flags");
    check_snr_exclusive(flags, "command-line flags");
    check_snr_exclusive(file, "config file");

    KeyValues merged = file;
    // A flag in either SNR form replaces both forms from the file.
    if (flags.count("snr") || flags.count("snr_db")) {
        merged.erase("snr");
        merged.erase("snr_db");
    }
    for (const auto& [key, value] : flags) merged[key] = value;

    RunConfig cfg;
    auto get = [&](const char* key) -> const std::string* {
        const auto it = merged.find(key);
        return it == merged.end() ? nullptr : &it->second;
    };

    Scenario& sc = cfg.scenario;
    if (auto v = get("sensors")) sc.num_sensors = parse_integer<int>("sensors", *v);
    if (auto v = get("bits_per_sensor")) sc.per_sensor_bits = parse_integer<std::int64_t>("bits_per_sensor", *v);
    if (auto v = get("alpha")) sc.redundancy_bits = parse_integer<std::int64_t>("alpha", *v);
    if (auto v = get("rate")) sc.coding_rate = parse_real("rate", *v);
    if (auto v = get("snr")) sc.channel.snr_linear = parse_real("snr", *v);
    if (auto v = get("snr_db")) sc.channel.snr_linear = snr_from_db(parse_real("snr_db", *v));
    if (auto v = get("slot_duration")) sc.channel.slot_duration = parse_real("slot_duration", *v);

    SimSettings& st = cfg.settings;
    if (auto v = get("frames")) st.frames = parse_integer<std::int64_t>("frames", *v);
    if (auto v = get("warmup")) {
        st.warmup_frames = parse_integer<std::int64_t>("warmup", *v);
    } else {
        st.warmup_frames = std::min<std::int64_t>(1000, st.frames / 10);
    }
    if (auto v = get("replications")) st.replications = parse_integer<int>("replications", *v);
    if (auto v = get("seed")) st.seed = parse_integer<std::uint64_t>("seed", *v);

    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        rethrow_for_scenario(e);
    }
    if (st.frames < 1) throw ConfigError("frames", "K must be >= 1");
    if (st.warmup_frames < 0) throw ConfigError("warmup", "W must be >= 0");
    if (st.frames <= st.warmup_frames) throw ConfigError("frames", "K must exceed warmup W");
    if (st.replications < 1) throw ConfigError("replications", "must be >= 1");
    return cfg;
}

KeyValues to_key_values(const RunConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    const SimSettings& st = cfg.settings;
    return {
        {"sensors", std::to_string(sc.num_sensors)},
        {"bits_per_sensor", std::to_string(sc.per_sensor_bits)},
        {"alpha", std::to_string(sc.redundancy_bits)},
        {"rate", format_exact(sc.coding_rate)},
        {"snr", format_exact(sc.channel.snr_linear)},
        {"slot_duration", format_exact(sc.channel.slot_duration)},
        {"frames", std::to_string(st.frames)},
        {"warmup", std::to_string(st.warmup_frames)},
        {"replications", std::to_string(st.replications)},
        {"seed", std::to_string(st.seed)},
    };
}

}  // namespace aoi
