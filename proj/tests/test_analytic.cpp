#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aoi/analytic.hpp"
#include "aoi/study.hpp"

using namespace aoi;

namespace {

constexpr double kEpsGrid[] = {0.01, 0.1, 0.3, 0.5, 0.7, 0.9};

// N = 4, L_h = 120, alpha = 0, R = 0.8, snr = 3: L = 480, M = 600, M_h = 150.
Scenario reference_point() {
    return Scenario{4, 120, 0, 0.8, {3.0, 1.0}};
}

EvalOptions forced(double eps) {
    EvalOptions o;
    o.forced_error_rate = eps;
    return o;
}

}  // namespace

TEST_CASE("blocklength rounding is half away from zero with a floor of one") {
    CHECK(blocklength_for(3, 2.0) == 2);
    CHECK(blocklength_for(5, 2.0) == 3);
    CHECK(blocklength_for(1, 10.0) == 1);
    CHECK(blocklength_for(480, 0.8) == 600);
    CHECK(blocklength_for(120, 0.7) == 171);
    CHECK_THROWS_AS(blocklength_for(10, 0.0), std::invalid_argument);
}

TEST_CASE("scenario derives both packet geometries") {
    const Scenario sc = reference_point();
    CHECK(sc.joint_bits() == 480);
    CHECK(sc.joint_blocklength() == 600);
    CHECK(sc.sensor_blocklength() == 150);

    Scenario bad = sc;
    bad.redundancy_bits = 480;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("L = N*L_h - alpha must be >= 1"), std::invalid_argument);
    bad.redundancy_bits = 479;
    CHECK_NOTHROW(bad.validate());
    bad.coding_rate = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sigma hand-derived values") {
    for (int n = 1; n <= 10; ++n) CHECK(sigma_closed_form(n, 0.0) == 0.0);
    CHECK(std::fabs(sigma_closed_form(1, 0.5) - 1.0) < 1e-12);
    CHECK(std::fabs(sigma_closed_form(2, 0.5) - 5.0 / 3.0) < 1e-12);
    CHECK(std::fabs(sigma_series_oracle(2, 0.5, 1e-12) - 5.0 / 3.0) < 1e-11);
    CHECK(sigma_series_oracle(3, 0.0, 1e-12) == 0.0);
    // mpmath direct tail sum.
    CHECK(std::fabs(sigma_closed_form(5, 0.3) - 1.3929436361066713) < 1e-12);
    CHECK(std::fabs(sigma_closed_form(5, 0.3) - sigma_series_oracle(5, 0.3, 1e-12)) < 1e-9);
}

TEST_CASE("beta hand-derived values") {
    for (int n = 1; n <= 10; ++n) CHECK(beta_closed_form(n, 0.0) == doctest::Approx(n).epsilon(1e-15));
    for (double e : kEpsGrid) CHECK(beta_closed_form(1, e) == 1.0);
    CHECK(std::fabs(beta_closed_form(2, 0.5) - 5.0 / 3.0) < 1e-12);

    const BetaSeries two = beta_series_oracle(2, 0.5, 1e-12);
    REQUIRE(two.pmf.size() == 2);
    CHECK(std::fabs(two.pmf[0] - 2.0 / 3.0) < 1e-11);
    CHECK(std::fabs(two.pmf[1] - 1.0 / 3.0) < 1e-11);
    CHECK(std::fabs(two.beta - 5.0 / 3.0) < 1e-11);

    const BetaSeries three = beta_series_oracle(3, 0.0, 1e-12);
    CHECK(three.pmf == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(three.beta == 3.0);

    CHECK(std::fabs(beta_closed_form(4, 0.7) - 2.6484865528449129) < 1e-12);
    CHECK(std::fabs(beta_closed_form(4, 0.7) - beta_series_oracle(4, 0.7, 1e-12).beta) < 1e-9);
}

TEST_CASE("closed forms agree with series oracles on the grid") {
    for (int n = 1; n <= 10; ++n) {
        double prev_sigma = -1.0;
        for (double e : kEpsGrid) {
            const double s = sigma_closed_form(n, e);
            CHECK(std::fabs(s - sigma_series_oracle(n, e, 1e-12)) <= 1e-9);
            CHECK(s >= prev_sigma);
            prev_sigma = s;
            if (n > 1) CHECK(s >= sigma_closed_form(n - 1, e));

            const double b = beta_closed_form(n, e);
            const BetaSeries series = beta_series_oracle(n, e, 1e-12);
            CHECK(std::fabs(b - series.beta) <= 1e-9);
            CHECK(std::fabs(std::accumulate(series.pmf.begin(), series.pmf.end(), 0.0) - 1.0) <= 1e-9);
            CHECK(b >= 1.0 - 1e-12);
            CHECK(b <= n + 1e-12);
        }
    }
}

TEST_CASE("badly conditioned binomial sums fall back to the series") {
    // Alternating sums with N = 40 lose all double precision term by term.
    for (int n : {30, 40, 60}) {
        for (double e : {0.3, 0.9}) {
            const double s = sigma_closed_form(n, e);
            const double so = sigma_series_oracle(n, e, 1e-14);
            CHECK(std::fabs(s - so) <= 1e-9 * std::max(1.0, so));
            const double b = beta_closed_form(n, e);
            CHECK(std::fabs(b - beta_series_oracle(n, e, 1e-14).beta) <= 1e-9 * n);
            CHECK(b >= 1.0);
            CHECK(b <= n);
        }
    }
}

TEST_CASE("closed forms stay accurate close to eps = 1") {
    for (double e : {0.999, 0.99991}) {
        const double s = sigma_closed_form(4, e);
        const double so = sigma_series_oracle(4, e, 1e-9);
        CHECK(std::fabs(s - so) <= 1e-10 * so);
        CHECK(std::fabs(beta_closed_form(4, e) - beta_series_oracle(4, e, 1e-12).beta) <= 1e-8);
    }
}

TEST_CASE("invalid error rates are rejected") {
    CHECK_THROWS_AS(sigma_closed_form(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sigma_series_oracle(2, 1.0, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(beta_closed_form(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_series_oracle(2, 1.5, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(sigma_closed_form(2, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(sigma_series_oracle(2, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sigma_closed_form(0, 0.5), std::invalid_argument);
}

TEST_CASE("f_max pmf") {
    for (std::int64_t f = 0; f < 20; ++f) CHECK(fmax_pmf(1, 0.5, f) == doctest::Approx(std::pow(0.5, f + 1)));
    CHECK(fmax_pmf(3, 0.0, 0) == 1.0);
    CHECK(fmax_pmf(3, 0.0, 1) == 0.0);
    double total = 0.0;
    double mean = 0.0;
    for (std::int64_t f = 0; f < 200; ++f) {
        total += fmax_pmf(5, 0.7, f);
        mean += static_cast<double>(f) * fmax_pmf(5, 0.7, f);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean == doctest::Approx(sigma_closed_form(5, 0.7)).epsilon(1e-10));
}

TEST_CASE("joint average AoI") {
    // N = 1, L_h = 80, R = 0.8 gives M = 100.
    const Scenario sc{1, 80, 0, 0.8, {3.0, 1.0}};
    REQUIRE(sc.joint_blocklength() == 100);
    CHECK(avg_aoi_joint(sc, forced(0.0)).avg_aoi_slots == 149.5);
    CHECK(avg_aoi_joint(sc, forced(0.1)).avg_aoi_slots == doctest::Approx(100.0 / 0.9 + 49.5).epsilon(1e-14));

    const AnalyticResult r = avg_aoi_joint(reference_point());
    CHECK(r.blocklength == 600);
    CHECK(r.avg_aoi_slots == doctest::Approx(899.50021174378826).epsilon(1e-12));
    CHECK(r.avg_aoi_slots == r.boundary_aoi + (r.blocklength - 1) / 2.0);
    CHECK(r.avg_aoi_slots >= (3.0 * r.blocklength - 1.0) / 2.0);
}

TEST_CASE("distributed average AoI") {
    Scenario three{3, 120, 0, 0.8, {3.0, 1.0}};
    REQUIRE(three.sensor_blocklength() == 150);
    const AnalyticResult zero = avg_aoi_distributed(three, forced(0.0));
    CHECK(zero.avg_aoi_slots == doctest::Approx(524.5).epsilon(1e-15));
    CHECK(zero.sigma == 0.0);
    CHECK(zero.beta == doctest::Approx(3.0).epsilon(1e-15));

    Scenario two{2, 120, 0, 0.8, {3.0, 1.0}};
    CHECK(avg_aoi_distributed(two, forced(0.5)).avg_aoi_slots == doctest::Approx(824.5).epsilon(1e-12));

    const AnalyticResult r = avg_aoi_distributed(reference_point());
    CHECK(r.avg_aoi_slots == doctest::Approx(684.39636448290626).epsilon(1e-12));
    CHECK(r.avg_aoi_slots == doctest::Approx(r.boundary_aoi + (r.blocklength - 1) / 2.0).epsilon(1e-15));
    CHECK(r.avg_aoi_slots >= (3.0 * r.blocklength - 1.0) / 2.0);

    CHECK(avg_aoi_distributed(reference_point(), forced(0.1)).avg_aoi_slots ==
          doctest::Approx(835.25621075621076).epsilon(1e-12));
}

TEST_CASE("schemes coincide for a single sensor") {
    for (std::int64_t bits : {40, 80, 120, 200, 333}) {
        for (double snr : {1.0, 3.0, 7.0, 15.0}) {
            const Scenario sc{1, bits, 0, 0.8, {snr, 1.0}};
            const double j = avg_aoi_joint(sc).avg_aoi_slots;
            const double d = avg_aoi_distributed(sc).avg_aoi_slots;
            CHECK(std::fabs(j - d) <= 1e-12 * std::max(1.0, j));
        }
    }
}

TEST_CASE("unbounded AoI is reported instead of a huge float") {
    const Scenario sc = reference_point();
    CHECK_THROWS_AS(avg_aoi_joint(sc, forced(1.0)), UnboundedAoi);
    CHECK_THROWS_AS(avg_aoi_distributed(sc, forced(1.0 - 1e-13)), UnboundedAoi);
    EvalOptions loose = forced(0.99);
    loose.unbounded_floor = 0.05;
    CHECK_THROWS_AS(avg_aoi_joint(sc, loose), UnboundedAoi);
    // R = 1.4 is far above capacity for L = 480.
    Scenario fast = sc;
    fast.coding_rate = 1.4;
    try {
        avg_aoi_joint(fast);
        FAIL("expected UnboundedAoi");
    } catch (const UnboundedAoi& e) {
        CHECK(e.scheme() == Scheme::Joint);
        CHECK(e.error_rate() > 1.0 - 1e-12);
    }
    CHECK_THROWS_AS(avg_aoi_joint(sc, forced(1.2)), std::invalid_argument);
}

TEST_CASE("aoi difference approximation") {
    Scenario sc = reference_point();
    sc.redundancy_bits = 120;  // (N - 1) L_h / 3
    CHECK(aoi_difference_approx(sc, forced(0.0)).slots == 0.0);

    sc.redundancy_bits = 0;
    const AoiDifference at0 = aoi_difference_approx(sc);
    CHECK(at0.slots > 0.0);
    CHECK_FALSE(at0.outside_low_error_regime);
    CHECK(exact_aoi_difference(sc) > 0.0);

    sc.redundancy_bits = 400;
    CHECK(aoi_difference_approx(sc).slots < 0.0);
    CHECK(exact_aoi_difference(sc) < 0.0);

    CHECK(aoi_difference_approx(sc, forced(0.1)).outside_low_error_regime);
}

TEST_CASE("alpha threshold") {
    Scenario sc = reference_point();
    const ThresholdResult limit = alpha_threshold(sc, forced(0.0));
    CHECK(limit.alpha_0 == doctest::Approx(120.0).epsilon(1e-14));
    Scenario one{1, 120, 0, 0.8, {3.0, 1.0}};
    CHECK(std::fabs(alpha_threshold(one, forced(0.0)).alpha_0) < 1e-12);

    const ThresholdResult t = alpha_threshold(sc);
    CHECK(t.alpha_0 == doctest::Approx(114.72193894245).epsilon(1e-11));
    CHECK(t.preferred == Preference::Distributed);
    CHECK(t.aoi_diff > 0.0);

    Scenario two = sc;
    two.num_sensors = 2;
    CHECK(alpha_threshold(two).alpha_0 == doctest::Approx(38.412442776311146).epsilon(1e-11));

    // Joint preferred exactly when the approximate difference is <= 0.
    for (std::int64_t alpha = 0; alpha < 480; alpha += 7) {
        sc.redundancy_bits = alpha;
        const ThresholdResult r = alpha_threshold(sc);
        CHECK((r.preferred == Preference::Joint) == (r.aoi_diff <= 0.0));
        CHECK((r.preferred == Preference::Joint) == (static_cast<double>(alpha) >= r.alpha_0));
    }
    sc.redundancy_bits = 120;
    CHECK(alpha_threshold(sc, forced(0.0)).preferred == Preference::Joint);
}

TEST_CASE("exact difference changes sign within one L_h of alpha_0 at low error rates") {
    for (int n : {2, 3, 4, 6}) {
        for (double rate : {0.6, 0.7, 0.8}) {
            Scenario sc{n, 120, 0, rate, {3.0, 1.0}};
            const ThresholdResult t = alpha_threshold(sc);
            REQUIRE(t.sensor_error_rate <= 0.05);
            const auto below = static_cast<std::int64_t>(std::floor(t.alpha_0)) - sc.per_sensor_bits;
            const auto above = static_cast<std::int64_t>(std::ceil(t.alpha_0)) + sc.per_sensor_bits;
            if (below >= 0) {
                sc.redundancy_bits = below;
                CHECK(exact_aoi_difference(sc) > 0.0);
            }
            if (above <= n * sc.per_sensor_bits - 1) {
                sc.redundancy_bits = above;
                CHECK(exact_aoi_difference(sc) <= 0.0);
            }
        }
    }
}
