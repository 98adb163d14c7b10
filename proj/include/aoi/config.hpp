#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

// Validation failure tied to one configuration key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

// sensors, bits_per_sensor, alpha, rate, snr, snr_db, slot_duration, frames,
// warmup, replications, seed
const std::vector<std::string>& config_keys();

// Flat `key = value` text; '#' starts a comment. Unknown or repeated keys are errors.
KeyValues parse_config_text(std::string_view text, const std::string& origin);
KeyValues read_config_file(const std::filesystem::path& path);

struct RunConfig {
    Scenario scenario;
    SimSettings settings;
};

// Precedence: flags > file > defaults. Without an explicit warmup the default
// is min(1000, frames / 10).
RunConfig resolve_config(const KeyValues& file, const KeyValues& flags);

// Every key with its resolved value, in config-file spelling.
KeyValues to_key_values(const RunConfig& cfg);

}  // namespace aoi
