#pragma once

#include <cstdint>

namespace aoi {

// Normal approximation is tight from this blocklength upward.
inline constexpr std::int64_t kTightBlocklength = 100;

struct ChannelParams {
    double snr_linear = 3.0;     // received SNR, linear scale
    double slot_duration = 1.0;  // seconds per channel use

    void validate() const;
};

struct PacketShape {
    std::int64_t update_bits = 1;
    std::int64_t blocklength = 1;

    double rate() const { return static_cast<double>(update_bits) / static_cast<double>(blocklength); }
    void validate() const;
};

// Corrected uses the (1 + snr)^2 dispersion term of the normal approximation.
// AsPrinted evaluates the (1 + snr^2) variant for comparison only.
enum class Dispersion { Corrected, AsPrinted };

struct ErrorRate {
    double value = 0.0;
    bool short_block = false;  // blocklength below kTightBlocklength
};

// Gaussian tail integral, Q(x) = erfc(x / sqrt 2) / 2.
double q_function(double x);

// Argument of Q in the block error rate; positive below capacity.
double error_rate_argument(const PacketShape& shape, const ChannelParams& ch,
                           Dispersion dispersion = Dispersion::Corrected);

ErrorRate block_error_rate(const PacketShape& shape, const ChannelParams& ch,
                           Dispersion dispersion = Dispersion::Corrected);

// Shannon capacity 0.5 * log2(1 + snr) in bits per channel use.
double awgn_capacity(double snr_linear);

double snr_from_db(double snr_db);
double snr_to_db(double snr_linear);

}  // namespace aoi
