#include "aoi/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace aoi {

namespace {

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

bool delivered(std::mt19937_64& gen, double eps) {
    return uniform01(gen) >= eps;
}

// Running sum of ages; the total is an exact integer.
class AgeAccumulator {
public:
    void add(std::uint64_t v) {
        if (__builtin_add_overflow(total_, v, &total_)) throw std::overflow_error("age accumulator overflow");
    }
    void add_frame(std::uint64_t start_age, std::uint64_t length) {
        std::uint64_t base = 0;
        if (__builtin_mul_overflow(start_age, length, &base)) throw std::overflow_error("age accumulator overflow");
        add(base);
        add(length * (length - 1) / 2);
    }
    double mean(std::uint64_t slots) const {
        return static_cast<double>(static_cast<long double>(total_) / static_cast<long double>(slots));
    }

private:
    std::uint64_t total_ = 0;
};

void audit(bool ok, const std::string& what, std::int64_t slot) {
    if (!ok) throw AuditFailure(what + " violated at slot " + std::to_string(slot));
}

double run_joint(std::int64_t m, double eps, const SimSettings& st, std::mt19937_64& gen) {
    const std::int64_t total = st.warmup_frames + st.frames;
    AgeAccumulator acc;
    if (st.path == SimPath::FrameJump && !st.audit) {
        std::int64_t age = m;
        for (std::int64_t k = 0; k < total; ++k) {
            if (k >= st.warmup_frames) acc.add_frame(static_cast<std::uint64_t>(age), static_cast<std::uint64_t>(m));
            age = delivered(gen, eps) ? m : age + m;
        }
    } else {
        // Initialised as if the previous packet, generated at -M, just arrived.
        SimState s{{m}, {-m}, {0}, 0};
        for (std::int64_t k = 0; k < total; ++k) {
            const std::int64_t start = k * m;
            if (st.audit) {
                audit(s.per_sensor_age[0] == s.consecutive_failures[0] * m + m, "joint boundary age", start);
            }
            for (std::int64_t j = 0; j < m; ++j, ++s.current_slot) {
                if (st.audit) {
                    audit(s.per_sensor_age[0] == s.current_slot - s.per_sensor_last_gen[0], "age = t - u(t)",
                          s.current_slot);
                }
                if (k >= st.warmup_frames) acc.add(static_cast<std::uint64_t>(s.overall_age()));
                ++s.per_sensor_age[0];
            }
            if (delivered(gen, eps)) {
                s.per_sensor_last_gen[0] = start;
                s.per_sensor_age[0] = s.current_slot - start;
                s.consecutive_failures[0] = 0;
            } else {
                ++s.consecutive_failures[0];
            }
        }
    }
    return acc.mean(static_cast<std::uint64_t>(st.frames) * static_cast<std::uint64_t>(m));
}

double run_distributed(int n, std::int64_t mh, double eps, const SimSettings& st, std::mt19937_64& gen) {
    const std::int64_t total = st.warmup_frames + st.frames;
    const auto count = static_cast<std::size_t>(n);
    const std::int64_t frame_len = mh * n;
    AgeAccumulator acc;
    if (st.path == SimPath::FrameJump && !st.audit) {
        // Ages held at sub-frame boundaries.
        std::vector<std::int64_t> age(count);
        for (std::size_t i = 0; i < count; ++i) age[i] = static_cast<std::int64_t>(count - i) * mh;
        for (std::int64_t k = 0; k < total; ++k) {
            for (std::size_t j = 0; j < count; ++j) {
                if (k >= st.warmup_frames) {
                    const std::int64_t peak = *std::max_element(age.begin(), age.end());
                    acc.add_frame(static_cast<std::uint64_t>(peak), static_cast<std::uint64_t>(mh));
                }
                for (auto& a : age) a += mh;
                if (delivered(gen, eps)) age[j] = mh;
            }
        }
    } else {
        // Sensor n (1-based) last delivered at -(N - n) * M_h a packet generated M_h earlier.
        SimState s;
        s.per_sensor_age.resize(count);
        s.per_sensor_last_gen.resize(count);
        s.consecutive_failures.assign(count, 0);
        for (std::size_t i = 0; i < count; ++i) {
            s.per_sensor_age[i] = static_cast<std::int64_t>(count - i) * mh;
            s.per_sensor_last_gen[i] = -s.per_sensor_age[i];
        }
        for (std::int64_t k = 0; k < total; ++k) {
            const std::int64_t frame_start = k * frame_len;
            if (st.audit) {
                for (std::size_t i = 0; i < count; ++i) {
                    audit(s.per_sensor_age[i] == s.consecutive_failures[i] * frame_len +
                                                      static_cast<std::int64_t>(count - i) * mh,
                          "distributed boundary age of sensor " + std::to_string(i + 1), frame_start);
                }
            }
            for (std::size_t j = 0; j < count; ++j) {
                const std::int64_t generated = frame_start + static_cast<std::int64_t>(j) * mh;
                for (std::int64_t m = 0; m < mh; ++m, ++s.current_slot) {
                    if (st.audit) {
                        for (std::size_t i = 0; i < count; ++i) {
                            audit(s.per_sensor_age[i] == s.current_slot - s.per_sensor_last_gen[i], "age = t - u(t)",
                                  s.current_slot);
                        }
                    }
                    if (k >= st.warmup_frames) acc.add(static_cast<std::uint64_t>(s.overall_age()));
                    for (auto& a : s.per_sensor_age) ++a;
                }
                if (delivered(gen, eps)) {
                    s.per_sensor_last_gen[j] = generated;
                    s.per_sensor_age[j] = s.current_slot - generated;
                    s.consecutive_failures[j] = 0;
                } else {
                    ++s.consecutive_failures[j];
                }
            }
        }
    }
    return acc.mean(static_cast<std::uint64_t>(st.frames) * static_cast<std::uint64_t>(frame_len));
}

template <class Replication>
SimResult replicate(const SimSettings& st, Replication&& body) {
    st.validate();
    const auto reps = static_cast<std::size_t>(st.replications);
    std::vector<double> means(reps, 0.0);
    unsigned workers = st.threads != 0 ? st.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            try {
                auto gen = replication_stream(st.seed, r);
                means[r] = body(gen);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    SimResult out;
    out.seed = st.seed;
    out.frames_used = st.frames;
    out.avg_aoi_slots = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(reps);
    out.ci95_half_width = ci95_half_width(means);
    out.per_replication_means = std::move(means);
    return out;
}

double resolve_error_rate(const std::optional<double>& forced, double model) {
    const double eps = forced.value_or(model);
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("error rate must lie in [0, 1]");
    return eps;
}

}  // namespace

void SimSettings::validate() const {
    if (frames < 1) throw std::invalid_argument("frames: K must be >= 1");
    if (warmup_frames < 0) throw std::invalid_argument("warmup: W must be >= 0");
    if (frames <= warmup_frames) throw std::invalid_argument("frames: K must exceed warmup W");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (forced_error_rate && !(*forced_error_rate >= 0.0 && *forced_error_rate <= 1.0)) {
        throw std::invalid_argument("forced_error_rate must lie in [0, 1]");
    }
}

std::int64_t SimState::overall_age() const {
    return *std::max_element(per_sensor_age.begin(), per_sensor_age.end());
}

std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t replication) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                      0x416f49u};
    return std::mt19937_64(seq);
}

double ci95_half_width(std::span<const double> means) {
    const std::size_t n = means.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : means) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    return boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
}

SimResult simulate_joint_frames(std::int64_t blocklength, double eps, const SimSettings& st) {
    if (blocklength < 1) throw std::invalid_argument("blocklength must be >= 1");
    if (eps >= 1.0 - kErrorCeilingGap) throw UnboundedAoi(Scheme::Joint, eps);
    SimResult r = replicate(st, [&](std::mt19937_64& gen) { return run_joint(blocklength, eps, st, gen); });
    r.error_rate = eps;
    r.blocklength = blocklength;
    return r;
}

SimResult simulate_distributed_frames(int n_sensors, std::int64_t sensor_blocklength, double eps,
                                      const SimSettings& st) {
    if (n_sensors < 1) throw std::invalid_argument("n_sensors must be >= 1");
    if (sensor_blocklength < 1) throw std::invalid_argument("sensor blocklength must be >= 1");
    if (eps >= 1.0 - kErrorCeilingGap) throw UnboundedAoi(Scheme::Distributed, eps);
    SimResult r = replicate(
        st, [&](std::mt19937_64& gen) { return run_distributed(n_sensors, sensor_blocklength, eps, st, gen); });
    r.error_rate = eps;
    r.blocklength = sensor_blocklength;
    return r;
}

SimResult simulate_joint(const Scenario& sc, const SimSettings& st) {
    sc.validate();
    const std::int64_t m = sc.joint_blocklength();
    const double eps = st.forced_error_rate
                           ? resolve_error_rate(st.forced_error_rate, 0.0)
                           : block_error_rate({sc.joint_bits(), m}, sc.channel, st.dispersion).value;
    return simulate_joint_frames(m, eps, st);
}

SimResult simulate_distributed(const Scenario& sc, const SimSettings& st) {
    sc.validate();
    const std::int64_t mh = sc.sensor_blocklength();
    const double eps = st.forced_error_rate
                           ? resolve_error_rate(st.forced_error_rate, 0.0)
                           : block_error_rate({sc.per_sensor_bits, mh}, sc.channel, st.dispersion).value;
    return simulate_distributed_frames(sc.num_sensors, mh, eps, st);
}

SimResult simulate(Scheme scheme, const Scenario& sc, const SimSettings& st) {
    return scheme == Scheme::Joint ? simulate_joint(sc, st) : simulate_distributed(sc, st);
}

double FmaxHistogram::frequency(std::int64_t f) const {
    if (f < 0 || static_cast<std::size_t>(f) >= counts.size() || samples == 0) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(f)]) / static_cast<double>(samples);
}

FmaxHistogram empirical_fmax_pmf(int n_sensors, double eps, std::int64_t samples, std::uint64_t seed) {
    if (n_sensors < 1) throw std::invalid_argument("n_sensors must be >= 1");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("error rate must satisfy 0 <= eps < 1");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    FmaxHistogram h;
    h.samples = samples;
    auto gen = replication_stream(seed, 0);
    const double log_eps = eps > 0.0 ? std::log(eps) : 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
        std::int64_t longest = 0;
        for (int n = 0; n < n_sensors; ++n) {
            // Inversion: Pr(f >= k) = eps^k.
            const std::int64_t f =
                eps > 0.0 ? static_cast<std::int64_t>(std::floor(std::log1p(-uniform01(gen)) / log_eps)) : 0;
            longest = std::max(longest, f);
        }
        if (static_cast<std::size_t>(longest) >= h.counts.size()) h.counts.resize(static_cast<std::size_t>(longest) + 1);
        ++h.counts[static_cast<std::size_t>(longest)];
    }
    return h;
}

}  // namespace aoi
