#include "aoi/analytic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

namespace aoi {

namespace {

// Closed forms are summed in long double; beyond this estimated relative error
// (Sum|term| / |Sum term| * LDBL_EPSILON) the series oracle is used instead.
constexpr long double kCancellationLimit = 1e6L * DBL_EPSILON;
constexpr double kFallbackTolerance = 1e-15;

// Iteration budget for the series oracles.
constexpr std::int64_t kSeriesBudget = 400'000'000;

void check_sensors(int n_sensors) {
    if (n_sensors < 1) throw std::invalid_argument("n_sensors must be >= 1");
}

void check_eps(double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw std::invalid_argument("error rate must satisfy 0 <= eps < 1 (got " + std::to_string(eps) + ")");
    }
}

void check_tol(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
}

// Row-by-row Pascal triangle up to n.
std::vector<std::vector<long double>> pascal(int n) {
    std::vector<std::vector<long double>> rows(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.assign(static_cast<std::size_t>(i) + 1, 1.0L);
        for (int j = 1; j < i; ++j) {
            row[static_cast<std::size_t>(j)] =
                rows[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1] +
                rows[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j)];
        }
    }
    return rows;
}

// 1 - eps^k without cancellation near eps = 1.
long double one_minus_power(long double eps, int k) {
    if (eps == 0.0L) return 1.0L;
    return -std::expm1(static_cast<long double>(k) * std::log(eps));
}

// 1 - (1 - x)^n for small x.
long double one_minus_complement_power(long double x, int n) {
    return -std::expm1(static_cast<long double>(n) * std::log1p(-x));
}

bool badly_conditioned(long double sum, long double magnitude) {
    if (magnitude == 0.0L) return false;
    if (sum == 0.0L) return true;
    return magnitude / std::fabs(sum) * LDBL_EPSILON > kCancellationLimit;
}

double checked_error_rate(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("forced error rate must lie in [0, 1] (got " + std::to_string(eps) + ")");
    }
    return eps;
}

bool is_unbounded(double eps, double floor) {
    return eps >= 1.0 - floor;
}

}  // namespace

std::string to_string(Scheme scheme) {
    return scheme == Scheme::Joint ? "joint" : "distributed";
}

std::string to_string(Preference preference) {
    switch (preference) {
        case Preference::Joint: return "Joint";
        case Preference::Distributed: return "Distributed";
        case Preference::Tie: return "Tie";
    }
    return "Tie";
}

UnboundedAoi::UnboundedAoi(Scheme scheme, double error_rate)
    : std::runtime_error("unbounded AoI: " + to_string(scheme) + " error rate " + std::to_string(error_rate) +
                         " leaves no room for a successful delivery"),
      scheme_(scheme),
      error_rate_(error_rate) {}

std::int64_t blocklength_for(std::int64_t bits, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("coding rate must be finite and > 0");
    const double m = std::round(static_cast<double>(bits) / rate);
    if (m > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) {
        throw std::invalid_argument("blocklength overflows for bits / rate");
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
}

std::int64_t Scenario::joint_bits() const {
    return static_cast<std::int64_t>(num_sensors) * per_sensor_bits - redundancy_bits;
}

std::int64_t Scenario::joint_blocklength() const {
    return blocklength_for(joint_bits(), coding_rate);
}

std::int64_t Scenario::sensor_blocklength() const {
    return blocklength_for(per_sensor_bits, coding_rate);
}

void Scenario::validate() const {
    if (num_sensors < 1) throw std::invalid_argument("num_sensors: N must be >= 1");
    if (per_sensor_bits < 1) throw std::invalid_argument("per_sensor_bits: L_h must be >= 1");
    if (redundancy_bits < 0) throw std::invalid_argument("redundancy_bits: alpha must be >= 0");
    if (!(coding_rate > 0.0) || !std::isfinite(coding_rate)) {
        throw std::invalid_argument("coding_rate: R must be finite and > 0");
    }
    if (joint_bits() < 1) throw std::invalid_argument("L = N*L_h - alpha must be >= 1");
    channel.validate();
}

double sigma_series_oracle(int n_sensors, double eps, double tol) {
    check_sensors(n_sensors);
    check_eps(eps);
    check_tol(tol);
    const long double e = eps;
    const long double n = n_sensors;
    long double sum = 0.0L;
    for (std::int64_t f = 1;; ++f) {
        const long double ef = std::pow(e, static_cast<long double>(f));
        if (n * ef / (1.0L - e) < tol) break;
        if (f > kSeriesBudget) throw std::runtime_error("sigma series exceeded its iteration budget");
        sum += one_minus_complement_power(ef, n_sensors);
    }
    return static_cast<double>(sum);
}

double sigma_closed_form(int n_sensors, double eps) {
    check_sensors(n_sensors);
    check_eps(eps);
    if (eps == 0.0) return 0.0;
    const long double e = eps;
    long double binom = 1.0L;
    long double sum = 0.0L;
    long double magnitude = 0.0L;
    for (int k = 1; k <= n_sensors; ++k) {
        binom = binom * static_cast<long double>(n_sensors - k + 1) / static_cast<long double>(k);
        const long double term = binom * std::pow(e, static_cast<long double>(k)) / one_minus_power(e, k);
        sum += (k % 2 == 1) ? term : -term;
        magnitude += term;
    }
    if (badly_conditioned(sum, magnitude)) {
        // sigma >= eps / (1 - eps), the single-sensor mean, sets the tolerance scale.
        const double scale = std::max(1.0, eps / (1.0 - eps));
        return sigma_series_oracle(n_sensors, eps, kFallbackTolerance * scale);
    }
    return static_cast<double>(sum);
}

BetaSeries beta_series_oracle(int n_sensors, double eps, double tol) {
    check_sensors(n_sensors);
    check_eps(eps);
    check_tol(tol);
    const auto count = static_cast<std::size_t>(n_sensors);
    const long double e = eps;
    std::vector<long double> acc(count, 0.0L);
    for (std::int64_t f = 0;; ++f) {
        const long double ef = std::pow(e, static_cast<long double>(f));
        if (f > 0 && static_cast<long double>(n_sensors) * ef < tol) break;
        if (f > kSeriesBudget) throw std::runtime_error("beta series exceeded its iteration budget");
        // Pr(f_k < f) for the sensors before n, Pr(f_k <= f) after it, Pr(f_n = f) for n itself.
        const long double below = 1.0L - ef;
        const long double at_most = 1.0L - ef * e;
        const long double exact = ef * (1.0L - e);
        for (std::size_t i = 0; i < count; ++i) {
            const long double before = i == 0 ? 1.0L : std::pow(below, static_cast<long double>(i));
            const long double after = std::pow(at_most, static_cast<long double>(count - 1 - i));
            acc[i] += before * after * exact;
        }
        if (eps == 0.0) break;
    }
    BetaSeries out;
    out.pmf.resize(count);
    long double beta = 0.0L;
    for (std::size_t i = 0; i < count; ++i) {
        out.pmf[i] = static_cast<double>(acc[i]);
        beta += acc[i] * static_cast<long double>(count - i);
    }
    out.beta = static_cast<double>(beta);
    return out;
}

double beta_closed_form(int n_sensors, double eps) {
    check_sensors(n_sensors);
    check_eps(eps);
    if (n_sensors == 1) return 1.0;
    const long double e = eps;
    const auto binom = pascal(n_sensors);
    std::vector<long double> eps_pow(static_cast<std::size_t>(n_sensors) + 1);
    std::vector<long double> inv_gap(static_cast<std::size_t>(n_sensors) + 2);
    for (int k = 0; k <= n_sensors; ++k) {
        eps_pow[static_cast<std::size_t>(k)] = k == 0 ? 1.0L : std::pow(e, static_cast<long double>(k));
        inv_gap[static_cast<std::size_t>(k) + 1] = 1.0L / one_minus_power(e, k + 1);
    }
    const long double lead = 1.0L - e;
    long double sum = 0.0L;
    long double magnitude = 0.0L;
    for (int n = 1; n <= n_sensors; ++n) {
        const long double weight = static_cast<long double>(n_sensors - n + 1) * lead;
        const auto& before = binom[static_cast<std::size_t>(n) - 1];
        const auto& after = binom[static_cast<std::size_t>(n_sensors - n)];
        for (int a = 0; a <= n - 1; ++a) {
            for (int b = 0; b <= n_sensors - n; ++b) {
                const long double term = weight * before[static_cast<std::size_t>(a)] *
                                         after[static_cast<std::size_t>(b)] * eps_pow[static_cast<std::size_t>(b)] *
                                         inv_gap[static_cast<std::size_t>(a + b) + 1];
                sum += ((a + b) % 2 == 0) ? term : -term;
                magnitude += term;
            }
        }
    }
    if (badly_conditioned(sum, magnitude)) {
        return beta_series_oracle(n_sensors, eps, kFallbackTolerance).beta;
    }
    return static_cast<double>(sum);
}

double fmax_pmf(int n_sensors, double eps, std::int64_t f) {
    check_sensors(n_sensors);
    check_eps(eps);
    if (f < 0) return 0.0;
    const long double e = eps;
    const long double lo = f == 0 ? 1.0L : std::pow(e, static_cast<long double>(f));
    const long double hi = lo * e;
    // (1 - eps^(f+1))^N - (1 - eps^f)^N, written as a difference of tails.
    const long double tail_lo = f == 0 ? 1.0L : one_minus_complement_power(lo, n_sensors);
    const long double tail_hi = one_minus_complement_power(hi, n_sensors);
    return static_cast<double>(tail_lo - tail_hi);
}

double joint_average_aoi(std::int64_t blocklength, double eps, double unbounded_floor) {
    if (blocklength < 1) throw std::invalid_argument("blocklength must be >= 1");
    checked_error_rate(eps);
    if (is_unbounded(eps, unbounded_floor)) throw UnboundedAoi(Scheme::Joint, eps);
    const double e = std::clamp(eps, 0.0, 1.0 - kErrorCeilingGap);
    const auto m = static_cast<double>(blocklength);
    return m / (1.0 - e) + (m - 1.0) / 2.0;
}

double distributed_average_aoi(int n_sensors, std::int64_t sensor_blocklength, double eps, double unbounded_floor) {
    check_sensors(n_sensors);
    if (sensor_blocklength < 1) throw std::invalid_argument("sensor blocklength must be >= 1");
    checked_error_rate(eps);
    if (is_unbounded(eps, unbounded_floor)) throw UnboundedAoi(Scheme::Distributed, eps);
    const double e = std::clamp(eps, 0.0, 1.0 - kErrorCeilingGap);
    const auto mh = static_cast<double>(sensor_blocklength);
    const double n = n_sensors;
    return sigma_closed_form(n_sensors, e) * n * mh + beta_closed_form(n_sensors, e) * mh + (mh - 1.0) / 2.0;
}

ErrorRate joint_error_rate(const Scenario& sc, const EvalOptions& opt) {
    sc.validate();
    if (opt.forced_error_rate) return {checked_error_rate(*opt.forced_error_rate), false};
    return block_error_rate({sc.joint_bits(), sc.joint_blocklength()}, sc.channel, opt.dispersion);
}

ErrorRate sensor_error_rate(const Scenario& sc, const EvalOptions& opt) {
    sc.validate();
    if (opt.forced_error_rate) return {checked_error_rate(*opt.forced_error_rate), false};
    return block_error_rate({sc.per_sensor_bits, sc.sensor_blocklength()}, sc.channel, opt.dispersion);
}

AnalyticResult avg_aoi_joint(const Scenario& sc, const EvalOptions& opt) {
    const ErrorRate eps = joint_error_rate(sc, opt);
    AnalyticResult r;
    r.scheme = Scheme::Joint;
    r.blocklength = sc.joint_blocklength();
    r.error_rate = eps.value;
    r.short_block = eps.short_block;
    r.avg_aoi_slots = joint_average_aoi(r.blocklength, eps.value, opt.unbounded_floor);
    r.boundary_aoi = static_cast<double>(r.blocklength) / (1.0 - std::clamp(eps.value, 0.0, 1.0 - kErrorCeilingGap));
    return r;
}

AnalyticResult avg_aoi_distributed(const Scenario& sc, const EvalOptions& opt) {
    const ErrorRate eps = sensor_error_rate(sc, opt);
    AnalyticResult r;
    r.scheme = Scheme::Distributed;
    r.blocklength = sc.sensor_blocklength();
    r.error_rate = eps.value;
    r.short_block = eps.short_block;
    r.avg_aoi_slots = distributed_average_aoi(sc.num_sensors, r.blocklength, eps.value, opt.unbounded_floor);
    const double e = std::clamp(eps.value, 0.0, 1.0 - kErrorCeilingGap);
    r.sigma = sigma_closed_form(sc.num_sensors, e);
    r.beta = beta_closed_form(sc.num_sensors, e);
    const auto mh = static_cast<double>(r.blocklength);
    r.boundary_aoi = r.sigma * sc.num_sensors * mh + r.beta * mh;
    return r;
}

AnalyticResult avg_aoi(Scheme scheme, const Scenario& sc, const EvalOptions& opt) {
    return scheme == Scheme::Joint ? avg_aoi_joint(sc, opt) : avg_aoi_distributed(sc, opt);
}

namespace {

struct SensorTerms {
    double eps;
    double sigma;
    double beta;
    bool unbounded;
};

SensorTerms sensor_terms(const Scenario& sc, const EvalOptions& opt) {
    const double eps = sensor_error_rate(sc, opt).value;
    if (is_unbounded(eps, opt.unbounded_floor)) return {eps, 0.0, 0.0, true};
    return {eps, sigma_closed_form(sc.num_sensors, eps), beta_closed_form(sc.num_sensors, eps), false};
}

}  // namespace

AoiDifference aoi_difference_approx(const Scenario& sc, const EvalOptions& opt) {
    const SensorTerms t = sensor_terms(sc, opt);
    AoiDifference d;
    d.sensor_error_rate = t.eps;
    d.outside_low_error_regime = t.eps > kLowErrorRegime;
    if (t.unbounded) {
        d.slots = -std::numeric_limits<double>::infinity();
        return d;
    }
    const double n = sc.num_sensors;
    const double ratio = static_cast<double>(sc.redundancy_bits) / static_cast<double>(sc.per_sensor_bits);
    const auto mh = static_cast<double>(sc.sensor_blocklength());
    d.slots = (1.5 * (n - ratio) - (n * t.sigma + 0.5 + t.beta)) * mh;
    return d;
}

ThresholdResult alpha_threshold(const Scenario& sc, const EvalOptions& opt) {
    const SensorTerms t = sensor_terms(sc, opt);
    const AoiDifference diff = aoi_difference_approx(sc, opt);
    ThresholdResult r;
    r.sensor_error_rate = t.eps;
    r.outside_low_error_regime = diff.outside_low_error_regime;
    r.aoi_diff = diff.slots;
    const double n = sc.num_sensors;
    r.alpha_0 = t.unbounded ? -std::numeric_limits<double>::infinity()
                            : ((3.0 - 2.0 * t.sigma) * n - 2.0 * t.beta - 1.0) *
                                  static_cast<double>(sc.per_sensor_bits) / 3.0;
    r.preferred = diff.slots <= 0.0 ? Preference::Joint : Preference::Distributed;
    return r;
}

}  // namespace aoi
