#include "aoi/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoi {

namespace {

constexpr std::int64_t kMaxBlocklength = 1'000'000;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t as_integer(double value, const char* what) {
    if (!std::isfinite(value) || value != std::floor(value)) {
        throw std::invalid_argument(std::string(what) + " grid values must be integers");
    }
    return static_cast<std::int64_t>(value);
}

std::vector<Scheme> schemes_of(SchemeSelection s) {
    switch (s) {
        case SchemeSelection::Joint: return {Scheme::Joint};
        case SchemeSelection::Distributed: return {Scheme::Distributed};
        case SchemeSelection::Both: return {Scheme::Joint, Scheme::Distributed};
    }
    return {};
}

double aoi_or_inf(Scheme scheme, const Scenario& sc, const EvalOptions& opt) {
    try {
        return avg_aoi(scheme, sc, opt).avg_aoi_slots;
    } catch (const UnboundedAoi&) {
        return kInf;
    }
}

}  // namespace

std::string to_string(SweptVariable v) {
    switch (v) {
        case SweptVariable::CodingRate: return "rate";
        case SweptVariable::NumSensors: return "sensors";
        case SweptVariable::Redundancy: return "alpha";
        case SweptVariable::Blocklength: return "blocklength";
    }
    return "rate";
}

SweptVariable parse_swept_variable(const std::string& name) {
    if (name == "rate") return SweptVariable::CodingRate;
    if (name == "sensors") return SweptVariable::NumSensors;
    if (name == "alpha") return SweptVariable::Redundancy;
    if (name == "blocklength") return SweptVariable::Blocklength;
    throw std::invalid_argument("swept variable must be one of rate, sensors, alpha, blocklength (got '" + name + "')");
}

SchemeSelection parse_scheme_selection(const std::string& name) {
    if (name == "joint") return SchemeSelection::Joint;
    if (name == "distributed") return SchemeSelection::Distributed;
    if (name == "both") return SchemeSelection::Both;
    throw std::invalid_argument("scheme must be one of joint, distributed, both (got '" + name + "')");
}

Optimum optimize_blocklength(Scheme scheme, std::int64_t bits, int num_sensors, const ChannelParams& ch,
                             IntRange m_range, const EvalOptions& opt) {
    if (bits < 1) throw std::invalid_argument("bits must be >= 1");
    if (num_sensors < 1) throw std::invalid_argument("num_sensors must be >= 1");
    if (m_range.lo > m_range.hi) throw std::invalid_argument("blocklength range is empty");
    if (m_range.lo < 1 || m_range.hi > kMaxBlocklength) {
        throw std::invalid_argument("blocklength range must lie within [1, 1000000]");
    }
    ch.validate();

    Optimum out;
    out.searched_range = m_range;
    out.best_aoi_slots = kInf;
    out.profile.reserve(static_cast<std::size_t>(m_range.hi - m_range.lo + 1));
    for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) {
        const double eps = opt.forced_error_rate ? *opt.forced_error_rate
                                                 : block_error_rate({bits, m}, ch, opt.dispersion).value;
        double aoi = kInf;
        try {
            aoi = scheme == Scheme::Joint ? joint_average_aoi(m, eps, opt.unbounded_floor)
                                          : distributed_average_aoi(num_sensors, m, eps, opt.unbounded_floor);
        } catch (const UnboundedAoi&) {
        }
        out.profile.emplace_back(m, aoi);
        // Strict comparison keeps the smallest M on ties.
        if (aoi < out.best_aoi_slots) {
            out.best_aoi_slots = aoi;
            out.best_blocklength = m;
        }
    }
    if (out.best_aoi_slots == kInf) {
        throw UnboundedAoi(scheme, opt.forced_error_rate.value_or(1.0));
    }
    out.at_range_boundary = out.best_blocklength == m_range.lo || out.best_blocklength == m_range.hi;
    return out;
}

Scenario substitute(const Scenario& base, SweptVariable v, double value, Scheme scheme) {
    Scenario sc = base;
    switch (v) {
        case SweptVariable::CodingRate:
            sc.coding_rate = value;
            break;
        case SweptVariable::NumSensors: {
            const std::int64_t n = as_integer(value, "sensors");
            if (n < 1 || n > std::numeric_limits<int>::max()) throw std::invalid_argument("sensors must be >= 1");
            sc.num_sensors = static_cast<int>(n);
            break;
        }
        case SweptVariable::Redundancy:
            sc.redundancy_bits = as_integer(value, "alpha");
            break;
        case SweptVariable::Blocklength: {
            const std::int64_t m = as_integer(value, "blocklength");
            if (m < 1) throw std::invalid_argument("blocklength must be >= 1");
            const std::int64_t bits = scheme == Scheme::Joint ? base.joint_bits() : base.per_sensor_bits;
            sc.coding_rate = static_cast<double>(bits) / static_cast<double>(m);
            break;
        }
    }
    sc.validate();
    return sc;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw std::invalid_argument("sweep grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
    }
    base.validate();
    for (double value : grid) {
        for (Scheme scheme : schemes_of(this->scheme)) substitute(base, swept_variable, value, scheme);
    }
    if (with_simulation) sim.validate();
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows;
    const auto schemes = schemes_of(spec.scheme);
    for (std::size_t idx = 0; idx < spec.grid.size(); ++idx) {
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            const Scheme scheme = schemes[s];
            const Scenario sc = substitute(spec.base, spec.swept_variable, spec.grid[idx], scheme);
            SweepRow row;
            row.swept_variable = spec.swept_variable;
            row.swept_value = spec.grid[idx];
            row.scheme = scheme;
            row.blocklength = scheme == Scheme::Joint ? sc.joint_blocklength() : sc.sensor_blocklength();
            const ErrorRate eps = scheme == Scheme::Joint ? joint_error_rate(sc, spec.eval) : sensor_error_rate(sc, spec.eval);
            row.error_rate = eps.value;
            row.short_block = eps.short_block;
            try {
                row.analytic_aoi_slots = avg_aoi(scheme, sc, spec.eval).avg_aoi_slots;
            } catch (const UnboundedAoi&) {
                row.unbounded = true;
            }
            if (spec.with_simulation && !row.unbounded) {
                SimSettings st = spec.sim;
                st.seed = spec.sim.seed + 2 * idx + s;
                const SimResult sim =
                    scheme == Scheme::Joint
                        ? simulate_joint_frames(row.blocklength, row.error_rate, st)
                        : simulate_distributed_frames(sc.num_sensors, row.blocklength, row.error_rate, st);
                row.sim_aoi_slots = sim.avg_aoi_slots;
                row.sim_ci95 = sim.ci95_half_width;
                row.seed = st.seed;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

double exact_aoi_difference(const Scenario& sc, const EvalOptions& opt) {
    const double joint = aoi_or_inf(Scheme::Joint, sc, opt);
    const double distributed = aoi_or_inf(Scheme::Distributed, sc, opt);
    if (joint == kInf && distributed == kInf) {
        throw UnboundedAoi(Scheme::Distributed, sensor_error_rate(sc, opt).value);
    }
    return joint - distributed;
}

double locate_crossover(const Scenario& base, IntRange alpha_range, const EvalOptions& opt) {
    if (alpha_range.lo >= alpha_range.hi) throw std::invalid_argument("alpha range must contain two points");
    auto diff_at = [&](std::int64_t alpha) {
        Scenario sc = base;
        sc.redundancy_bits = alpha;
        sc.validate();
        return exact_aoi_difference(sc, opt);
    };
    // Joint wins (or ties) where the difference is <= 0.
    auto joint_side = [](double d) { return d <= 0.0; };

    std::int64_t a = alpha_range.lo;
    std::int64_t b = alpha_range.hi;
    double da = diff_at(a);
    double db = diff_at(b);
    if (joint_side(da) == joint_side(db)) throw std::domain_error("no crossover in alpha range");
    while (b - a > 1) {
        const std::int64_t mid = a + (b - a) / 2;
        const double dm = diff_at(mid);
        if (joint_side(dm) == joint_side(da)) {
            a = mid;
            da = dm;
        } else {
            b = mid;
            db = dm;
        }
    }
    if (!std::isfinite(da) || !std::isfinite(db)) return static_cast<double>(joint_side(da) ? a : b);
    if (da == db) return static_cast<double>(b);
    return static_cast<double>(a) + da / (da - db);
}

Preference preference_from_exact(double joint_aoi, double distributed_aoi) {
    if (joint_aoi < distributed_aoi) return Preference::Joint;
    if (distributed_aoi < joint_aoi) return Preference::Distributed;
    return Preference::Tie;
}

std::vector<double> coding_rate_grid() {
    std::vector<double> grid;
    for (int hundredths = 30; hundredths <= 140; hundredths += 5) grid.push_back(hundredths / 100.0);
    return grid;
}

std::vector<double> sensor_grid() {
    std::vector<double> grid;
    for (int n = 1; n <= 10; ++n) grid.push_back(n);
    return grid;
}

std::vector<double> redundancy_grid(const Scenario& base) {
    std::vector<double> grid;
    const std::int64_t top = static_cast<std::int64_t>(base.num_sensors) * base.per_sensor_bits - base.per_sensor_bits;
    for (std::int64_t alpha = 0; alpha <= top; alpha += 40) grid.push_back(static_cast<double>(alpha));
    return grid;
}

SweepSpec figure3_spec(const Scenario& base) {
    SweepSpec spec;
    spec.base = base;
    spec.swept_variable = SweptVariable::CodingRate;
    spec.grid = coding_rate_grid();
    return spec;
}

SweepSpec figure4_spec(const Scenario& base) {
    SweepSpec spec;
    spec.base = base;
    spec.swept_variable = SweptVariable::NumSensors;
    spec.grid = sensor_grid();
    return spec;
}

SweepSpec figure5_spec(const Scenario& base) {
    SweepSpec spec;
    spec.base = base;
    spec.swept_variable = SweptVariable::Redundancy;
    spec.grid = redundancy_grid(base);
    return spec;
}

}  // namespace aoi
