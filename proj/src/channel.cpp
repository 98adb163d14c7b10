#include "aoi/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aoi {

void ChannelParams::validate() const {
    if (!std::isfinite(snr_linear) || snr_linear <= 0.0) {
        throw std::invalid_argument("snr_linear must be finite and > 0 (got " + std::to_string(snr_linear) + ")");
    }
    if (!std::isfinite(slot_duration) || slot_duration <= 0.0) {
        throw std::invalid_argument("slot_duration must be finite and > 0");
    }
}

void PacketShape::validate() const {
    if (update_bits < 1) throw std::invalid_argument("update_bits must be >= 1");
    if (blocklength < 1) throw std::invalid_argument("blocklength must be >= 1");
}

double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double awgn_capacity(double snr_linear) {
    return 0.5 * std::log2(1.0 + snr_linear);
}

double error_rate_argument(const PacketShape& shape, const ChannelParams& ch, Dispersion dispersion) {
    shape.validate();
    ch.validate();
    const double g = ch.snr_linear;
    const double denom_term = dispersion == Dispersion::Corrected ? (1.0 + g) * (1.0 + g) : 1.0 + g * g;
    const auto m = static_cast<double>(shape.blocklength);
    const double spread = std::numbers::log2e * std::sqrt((1.0 - 1.0 / denom_term) / (2.0 * m));
    return (awgn_capacity(g) - shape.rate()) / spread;
}

ErrorRate block_error_rate(const PacketShape& shape, const ChannelParams& ch, Dispersion dispersion) {
    const double z = error_rate_argument(shape, ch, dispersion);
    return {q_function(z), shape.blocklength < kTightBlocklength};
}

double snr_from_db(double snr_db) {
    return std::pow(10.0, snr_db / 10.0);
}

double snr_to_db(double snr_linear) {
    return 10.0 * std::log10(snr_linear);
}

}  // namespace aoi
