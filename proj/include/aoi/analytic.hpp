#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/channel.hpp"

namespace aoi {

enum class Scheme { Joint, Distributed };
enum class Preference { Joint, Distributed, Tie };

std::string to_string(Scheme scheme);
std::string to_string(Preference preference);

// Error rates are clamped to [0, 1 - kErrorCeilingGap] before any division.
inline constexpr double kErrorCeilingGap = 1e-12;

// Thrown when 1 - eps falls below the configured floor: the average age diverges.
class UnboundedAoi : public std::runtime_error {
public:
    UnboundedAoi(Scheme scheme, double error_rate);
    Scheme scheme() const { return scheme_; }
    double error_rate() const { return error_rate_; }

private:
    Scheme scheme_;
    double error_rate_;
};

// Blocklength for `bits` at coding rate `rate`: round half away from zero, at least 1.
std::int64_t blocklength_for(std::int64_t bits, double rate);

// N homogeneous sensors of L_h bits each, alpha bits of redundancy across them.
struct Scenario {
    int num_sensors = 4;
    std::int64_t per_sensor_bits = 120;
    std::int64_t redundancy_bits = 0;
    double coding_rate = 0.8;
    ChannelParams channel{};

    std::int64_t joint_bits() const;          // L = N * L_h - alpha
    std::int64_t joint_blocklength() const;   // M
    std::int64_t sensor_blocklength() const;  // M_h

    void validate() const;
};

struct EvalOptions {
    // Bypasses the channel model for every packet when set.
    std::optional<double> forced_error_rate;
    double unbounded_floor = kErrorCeilingGap;
    Dispersion dispersion = Dispersion::Corrected;
};

struct AnalyticResult {
    Scheme scheme = Scheme::Joint;
    double avg_aoi_slots = 0.0;
    double error_rate = 0.0;
    double boundary_aoi = 0.0;  // mean age at frame boundaries
    double sigma = 0.0;         // E[f_max], distributed only
    double beta = 0.0;          // E[N - n* + 1], distributed only
    std::int64_t blocklength = 0;
    bool short_block = false;
};

struct BetaSeries {
    double beta = 0.0;
    std::vector<double> pmf;  // pmf[n - 1] = Pr(n* = n)
};

// Expected largest run of consecutive failures over n independent sensors,
// sum_{k=1..n} C(n,k) (-1)^(k+1) eps^k / (1 - eps^k).
double sigma_closed_form(int n_sensors, double eps);

// Tail sum sum_{f>=1} 1 - (1 - eps^f)^n, truncated once the remaining tail is below tol.
double sigma_series_oracle(int n_sensors, double eps, double tol);

// E[n - n* + 1] where n* is the stalest sensor among those with the longest failure run.
double beta_closed_form(int n_sensors, double eps);

BetaSeries beta_series_oracle(int n_sensors, double eps, double tol);

// Pr(f_max = f) for n independent geometric failure runs.
double fmax_pmf(int n_sensors, double eps, std::int64_t f);

// Closed forms for a given frame geometry and error rate.
double joint_average_aoi(std::int64_t blocklength, double eps, double unbounded_floor = kErrorCeilingGap);
double distributed_average_aoi(int n_sensors, std::int64_t sensor_blocklength, double eps,
                               double unbounded_floor = kErrorCeilingGap);

// eps of the joint packet (L bits over M uses) and of one sensor packet (L_h over M_h).
ErrorRate joint_error_rate(const Scenario& sc, const EvalOptions& opt = {});
ErrorRate sensor_error_rate(const Scenario& sc, const EvalOptions& opt = {});

AnalyticResult avg_aoi_joint(const Scenario& sc, const EvalOptions& opt = {});
AnalyticResult avg_aoi_distributed(const Scenario& sc, const EvalOptions& opt = {});
AnalyticResult avg_aoi(Scheme scheme, const Scenario& sc, const EvalOptions& opt = {});

// Above this sensor error rate the low-error difference approximation is not trusted.
inline constexpr double kLowErrorRegime = 0.05;

struct AoiDifference {
    double slots = 0.0;  // approximate Delta_J - Delta_D
    double sensor_error_rate = 0.0;
    bool outside_low_error_regime = false;
};

AoiDifference aoi_difference_approx(const Scenario& sc, const EvalOptions& opt = {});

struct ThresholdResult {
    double alpha_0 = 0.0;
    double aoi_diff = 0.0;
    Preference preferred = Preference::Joint;
    double sensor_error_rate = 0.0;
    bool outside_low_error_regime = false;
};

// Redundancy above which joint encoding wins, ((3 - 2 sigma) N - 2 beta - 1) L_h / 3.
ThresholdResult alpha_threshold(const Scenario& sc, const EvalOptions& opt = {});

}  // namespace aoi
