#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "aoi/study.hpp"

namespace aoi {

inline constexpr std::string_view kSweepCsvHeader =
    "swept_var,value,scheme,blocklength,error_rate,aoi_analytic_slots,aoi_sim_slots,aoi_sim_ci95,seed,flags";

// 12 significant digits, shortest form, '.' decimal point regardless of locale.
std::string format_number(double v);
// Shortest representation that parses back to the same double.
std::string format_exact(double v);

void emit_csv(std::span<const SweepRow> rows, std::ostream& out);
std::string csv_string(std::span<const SweepRow> rows);
// Failures name the destination path and the OS error.
void emit_csv_file(std::span<const SweepRow> rows, const std::filesystem::path& path);

void emit_profile_csv(const Optimum& opt, std::ostream& out);

}  // namespace aoi
