#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/analytic.hpp"

namespace aoi {

// FrameJump accumulates whole frames at once (ages are affine inside a frame);
// SlotLevel steps every channel use. Both consume the RNG identically.
enum class SimPath { FrameJump, SlotLevel };

struct SimSettings {
    std::int64_t frames = 100'000;       // K, frames averaged after warm-up
    std::int64_t warmup_frames = 1'000;  // W, discarded before averaging
    int replications = 20;
    std::uint64_t seed = 1;
    std::optional<double> forced_error_rate;
    SimPath path = SimPath::FrameJump;
    // Slot-level run that checks the age bookkeeping at every slot and frame boundary.
    bool audit = false;
    unsigned threads = 0;  // 0 picks std::thread::hardware_concurrency()
    Dispersion dispersion = Dispersion::Corrected;

    void validate() const;
};

// Per-sensor bookkeeping. The joint scheme tracks a single entry since every
// sensor shares one packet and therefore one age.
struct SimState {
    std::vector<std::int64_t> per_sensor_age;        // Delta_n(t)
    std::vector<std::int64_t> per_sensor_last_gen;   // u_n(t)
    std::vector<std::int64_t> consecutive_failures;  // f_n
    std::int64_t current_slot = 0;

    std::int64_t overall_age() const;
};

// Raised by audit mode when an age invariant breaks.
class AuditFailure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct SimResult {
    double avg_aoi_slots = 0.0;
    double ci95_half_width = 0.0;
    std::int64_t frames_used = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_replication_means;
    double error_rate = 0.0;
    std::int64_t blocklength = 0;
};

// Independent stream for replication r of a run seeded with `seed`.
std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t replication);

// Student-t 95% half-width of the mean of `means`; infinite for fewer than two values.
double ci95_half_width(std::span<const double> means);

SimResult simulate_joint_frames(std::int64_t blocklength, double eps, const SimSettings& st);
SimResult simulate_distributed_frames(int n_sensors, std::int64_t sensor_blocklength, double eps,
                                      const SimSettings& st);

SimResult simulate_joint(const Scenario& sc, const SimSettings& st);
SimResult simulate_distributed(const Scenario& sc, const SimSettings& st);
SimResult simulate(Scheme scheme, const Scenario& sc, const SimSettings& st);

struct FmaxHistogram {
    std::vector<std::uint64_t> counts;  // counts[f] = samples with f_max = f
    std::int64_t samples = 0;

    double frequency(std::int64_t f) const;
};

FmaxHistogram empirical_fmax_pmf(int n_sensors, double eps, std::int64_t samples, std::uint64_t seed);

}  // namespace aoi
