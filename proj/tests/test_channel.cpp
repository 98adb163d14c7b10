#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "aoi/channel.hpp"

using namespace aoi;

// Reference values from tests/oracle/aoi_oracle.py (mpmath, 40 digits).
TEST_CASE("q_function matches high-precision erfc") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(std::fabs(q_function(1.96) - 0.02499789514822043413658427) < 1e-12);
    CHECK(std::fabs(q_function(-3.0) - 0.9986501019683699054733482) < 1e-12);
    CHECK(std::fabs(q_function(5.0) - 2.866515718791939116737523e-7) < 1e-12);
    CHECK(std::fabs(q_function(1.96) - 0.0249979) < 1e-6);
}

TEST_CASE("q_function reflection and monotonicity") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> x(-9.0, 9.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = x(gen);
        CHECK(std::fabs(q_function(a) + q_function(-a) - 1.0) <= 1e-12);
        const double b = a + 1e-3;
        // Q saturates to 1.0 in double precision near x = -8.
        if (a > -7.0) CHECK(q_function(b) < q_function(a));
        CHECK(q_function(b) <= q_function(a));
    }
}

TEST_CASE("block error rate examples") {
    const ChannelParams ch{3.0, 1.0};
    // Numerator zero: rate equals capacity 0.5 * log2(4) = 1.
    CHECK(block_error_rate({150, 150}, ch).value == doctest::Approx(0.5).epsilon(1e-14));

    const double z = error_rate_argument({120, 150}, ch);
    CHECK(z == doctest::Approx(2.4798787426309735).epsilon(1e-12));
    const ErrorRate e = block_error_rate({120, 150}, ch);
    CHECK(std::fabs(e.value - 0.0065713534336493819) < 1e-14);
    CHECK_FALSE(e.short_block);

    const ErrorRate above = block_error_rate({120, 50}, ch);
    CHECK(above.value > 0.999);
    CHECK(above.short_block);

    CHECK(std::fabs(block_error_rate({480, 600}, ch).value - 3.5290618923095638e-7) < 1e-16);
}

TEST_CASE("printed dispersion variant is available for comparison") {
    const ChannelParams ch{3.0, 1.0};
    const double printed = block_error_rate({120, 150}, ch, Dispersion::AsPrinted).value;
    CHECK(std::fabs(printed - 0.0056866388075189112) < 1e-14);
    CHECK(printed != block_error_rate({120, 150}, ch).value);
}

TEST_CASE("block error rate is non-decreasing in l and bounded") {
    const ChannelParams ch{3.0, 1.0};
    for (std::int64_t m : {20, 100, 150, 600}) {
        double prev = -1.0;
        for (std::int64_t l = 1; l <= 3 * m; ++l) {
            const double e = block_error_rate({l, m}, ch).value;
            CHECK(e >= 0.0);
            CHECK(e <= 1.0);
            CHECK(e >= prev);
            prev = e;
        }
    }
}

TEST_CASE("longer blocks at a fixed sub-capacity rate are more reliable") {
    const ChannelParams ch{3.0, 1.0};
    double prev = 1.0;
    for (std::int64_t m = 100; m <= 1000; m += 100) {
        const double e = block_error_rate({m * 8 / 10, m}, ch).value;
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("invalid channel and packet parameters are rejected") {
    CHECK_THROWS_AS(block_error_rate({1, 1}, {std::numeric_limits<double>::infinity(), 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(block_error_rate({1, 1}, {std::nan(""), 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(block_error_rate({1, 1}, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(block_error_rate({0, 1}, {3.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(block_error_rate({1, 0}, {3.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(block_error_rate({1, 1}, {3.0, 0.0}), std::invalid_argument);
}

TEST_CASE("SNR dB conversion") {
    CHECK(snr_to_db(3.0) == doctest::Approx(4.771212547).epsilon(1e-9));
    CHECK(snr_from_db(snr_to_db(3.0)) == doctest::Approx(3.0).epsilon(1e-14));
}
