#include "aoi/csv.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace aoi {

namespace {

std::string row_flags(const SweepRow& row) {
    std::string flags;
    auto add = [&](std::string_view f) {
        if (!flags.empty()) flags += ';';
        flags += f;
    };
    if (row.unbounded) add("unbounded_aoi");
    if (row.short_block) add("short_block");
    return flags;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), ptr);
}

std::string format_exact(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), ptr);
}

void emit_csv(std::span<const SweepRow> rows, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        out << to_string(r.swept_variable) << ',' << format_number(r.swept_value) << ',' << to_string(r.scheme) << ','
            << r.blocklength << ',' << format_number(r.error_rate) << ','
            << (r.analytic_aoi_slots ? format_number(*r.analytic_aoi_slots) : "") << ','
            << (r.sim_aoi_slots ? format_number(*r.sim_aoi_slots) : "") << ','
            << (r.sim_ci95 ? format_number(*r.sim_ci95) : "") << ','
            << (r.seed ? std::to_string(*r.seed) : "") << ',' << row_flags(r) << '\n';
    }
}

std::string csv_string(std::span<const SweepRow> rows) {
    std::ostringstream out;
    emit_csv(rows, out);
    return out.str();
}

void emit_csv_file(std::span<const SweepRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
    emit_csv(rows, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string() + ": " + std::strerror(errno));
}

void emit_profile_csv(const Optimum& opt, std::ostream& out) {
    out << "blocklength,aoi_analytic_slots\n";
    for (const auto& [m, aoi] : opt.profile) {
        out << m << ',' << (std::isfinite(aoi) ? format_number(aoi) : "") << '\n';
    }
}

}  // namespace aoi
