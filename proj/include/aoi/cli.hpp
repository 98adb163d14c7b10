#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Runs one command line (without the program name). Subcommands: analyze,
// simulate, sweep, optimize, compare, replay.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoi
