#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

enum class SchemeSelection { Joint, Distributed, Both };
enum class SweptVariable { CodingRate, NumSensors, Redundancy, Blocklength };

std::string to_string(SweptVariable v);
SweptVariable parse_swept_variable(const std::string& name);
SchemeSelection parse_scheme_selection(const std::string& name);

struct IntRange {
    std::int64_t lo = 1;
    std::int64_t hi = 1;
};

struct Optimum {
    std::int64_t best_blocklength = 0;
    double best_aoi_slots = 0.0;
    IntRange searched_range;
    // (M, Delta) per grid point; +inf where the age is unbounded.
    std::vector<std::pair<std::int64_t, double>> profile;
    bool at_range_boundary = false;
};

// Exhaustive integer search of the analytic age over `m_range`. For the joint
// scheme `bits` is L and the searched variable is M; for the distributed scheme
// `bits` is L_h and the searched variable is M_h.
Optimum optimize_blocklength(Scheme scheme, std::int64_t bits, int num_sensors, const ChannelParams& ch,
                             IntRange m_range, const EvalOptions& opt = {});

struct SweepSpec {
    SchemeSelection scheme = SchemeSelection::Both;
    SweptVariable swept_variable = SweptVariable::CodingRate;
    std::vector<double> grid;
    Scenario base{};
    bool with_simulation = false;
    SimSettings sim{};
    EvalOptions eval{};

    void validate() const;
};

struct SweepRow {
    SweptVariable swept_variable = SweptVariable::CodingRate;
    double swept_value = 0.0;
    Scheme scheme = Scheme::Joint;
    std::int64_t blocklength = 0;
    double error_rate = 0.0;
    std::optional<double> analytic_aoi_slots;  // empty when unbounded
    std::optional<double> sim_aoi_slots;
    std::optional<double> sim_ci95;
    std::optional<std::uint64_t> seed;
    bool unbounded = false;
    bool short_block = false;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Scenario with one grid value substituted. Blocklength sweeps keep the bit
// counts and set the rate to bits / value for the scheme being evaluated, so
// the derived M (joint) or M_h (distributed) equals the grid value.
Scenario substitute(const Scenario& base, SweptVariable v, double value, Scheme scheme);

// Exact Delta_J(alpha) - Delta_D; +inf when the joint age is unbounded.
double exact_aoi_difference(const Scenario& sc, const EvalOptions& opt = {});

// Integer bisection on the exact difference. Returns the zero of the
// difference interpolated between the two bracketing integers.
double locate_crossover(const Scenario& base, IntRange alpha_range, const EvalOptions& opt = {});

Preference preference_from_exact(double joint_aoi, double distributed_aoi);

// Grids that reproduce the published experiment axes.
std::vector<double> coding_rate_grid();           // 0.30, 0.35, ..., 1.40
std::vector<double> sensor_grid();                // 1..10
std::vector<double> redundancy_grid(const Scenario& base);  // 0, 40, ..., N*L_h - L_h

SweepSpec figure3_spec(const Scenario& base);   // Delta vs R
SweepSpec figure4_spec(const Scenario& base);   // Delta vs N
SweepSpec figure5_spec(const Scenario& base);   // Delta vs alpha

}  // namespace aoi
