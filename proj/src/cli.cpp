#include "aoi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "aoi/analytic.hpp"
#include "aoi/config.hpp"
#include "aoi/csv.hpp"
#include "aoi/manifest.hpp"
#include "aoi/simulator.hpp"
#include "aoi/study.hpp"

namespace aoi {

namespace {

struct ScenarioFlag {
    const char* key;
    const char* flag;
    const char* help;
};

constexpr ScenarioFlag kScenarioFlags[] = {
    {"sensors", "--sensors", "number of sensors N"},
    {"bits_per_sensor", "--bits-per-sensor", "bits per sensor update L_h"},
    {"alpha", "--alpha", "information redundancy alpha (bits)"},
    {"rate", "--rate", "coding rate R (bits per channel use)"},
    {"snr", "--snr", "received SNR, linear"},
    {"snr_db", "--snr-db", "received SNR in dB"},
    {"slot_duration", "--slot-duration", "seconds per channel use T_u"},
    {"frames", "--frames", "frames K averaged per replication"},
    {"warmup", "--warmup", "warm-up frames W discarded first"},
    {"replications", "--replications", "independent replications"},
    {"seed", "--seed", "64-bit base seed"},
};

// Options of one subcommand. Values stay as text until the command runs so
// the manifest can record exactly what was given.
struct Command {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> config_values;
    std::map<std::string, CLI::Option*> config_opts;
    std::string config_path;
    std::string manifest_path;
    std::string output_path;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;
    std::vector<std::pair<std::string, CLI::Option*>> recorded;

    void option(const std::string& flag, const std::string& help) {
        recorded.emplace_back(flag, app->add_option(flag, values[flag], help));
    }
    void flag(const std::string& name, const std::string& help) {
        recorded.emplace_back(name, app->add_flag(name, switches[name], help));
    }
    bool given(const std::string& name) const {
        for (const auto& [n, opt] : recorded) {
            if (n == name) return opt->count() > 0;
        }
        return false;
    }
    const std::string& value(const std::string& flag) const { return values.at(flag); }
    bool on(const std::string& name) const { return switches.at(name); }

    KeyValues flag_layer() const {
        KeyValues kv;
        for (const auto& [key, opt] : config_opts) {
            if (opt->count() > 0) kv[key] = config_values.at(key);
        }
        return kv;
    }
    std::vector<std::string> canonical_args() const {
        std::vector<std::string> args;
        for (const auto& [name, opt] : recorded) {
            if (opt->count() == 0) continue;
            args.push_back(name);
            if (switches.count(name) == 0) args.push_back(values.at(name));
        }
        return args;
    }
};

std::unique_ptr<Command> make_command(CLI::App& parent, const std::string& name, const std::string& description,
                                      bool with_output) {
    auto cmd = std::make_unique<Command>();
    cmd->app = parent.add_subcommand(name, description);
    for (const auto& f : kScenarioFlags) {
        cmd->config_opts[f.key] = cmd->app->add_option(f.flag, cmd->config_values[f.key], f.help);
    }
    cmd->app->add_option("--config", cmd->config_path, "flat key = value configuration file");
    cmd->app->add_option("--manifest", cmd->manifest_path, "write a run manifest (JSON) to this path");
    if (with_output) cmd->app->add_option("--output,-o", cmd->output_path, "CSV destination (default: stdout)");
    return cmd;
}

double parse_real_flag(const std::string& flag, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(flag, "expected a finite real number, got '" + text + "'");
    }
    return v;
}

std::int64_t parse_int_flag(const std::string& flag, const std::string& text) {
    std::int64_t v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(flag, "expected an integer, got '" + text + "'");
    return v;
}

// Snap to 12 significant digits so accumulated steps print and round cleanly.
double snap(double v) {
    double out = 0.0;
    const std::string s = format_number(v);
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(parse_real_flag("--grid", item));
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
            throw ConfigError("--grid", "expected start:stop:step with step > 0 and stop >= start");
        }
        const double span = (parts[1] - parts[0]) / parts[2];
        if (span > 1e7) throw ConfigError("--grid", "too many grid points");
        const auto count = static_cast<std::int64_t>(std::floor(span + 1e-9));
        for (std::int64_t i = 0; i <= count; ++i) grid.push_back(snap(parts[0] + static_cast<double>(i) * parts[2]));
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(parse_real_flag("--grid", item));
    }
    return grid;
}

EvalOptions eval_options(const Command& cmd) {
    EvalOptions eval;
    if (cmd.given("--forced-error")) {
        const double e = parse_real_flag("--forced-error", cmd.value("--forced-error"));
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("--forced-error", "must lie in [0, 1]");
        eval.forced_error_rate = e;
    }
    if (cmd.switches.count("--printed-dispersion") && cmd.on("--printed-dispersion")) {
        eval.dispersion = Dispersion::AsPrinted;
    }
    return eval;
}

void apply_sim_options(const Command& cmd, const EvalOptions& eval, SimSettings& st) {
    st.forced_error_rate = eval.forced_error_rate;
    st.dispersion = eval.dispersion;
    if (cmd.given("--threads")) {
        const std::int64_t t = parse_int_flag("--threads", cmd.value("--threads"));
        if (t < 0) throw ConfigError("--threads", "must be >= 0");
        st.threads = static_cast<unsigned>(t);
    }
    if (cmd.switches.count("--slot-level") && cmd.on("--slot-level")) st.path = SimPath::SlotLevel;
    if (cmd.switches.count("--audit") && cmd.on("--audit")) st.audit = true;
}

struct Units {
    double scale = 1.0;
    const char* label = "slots";
};

Units units_for(const Command& cmd, const Scenario& sc) {
    if (cmd.switches.count("--seconds") && cmd.on("--seconds")) return {sc.channel.slot_duration, "s"};
    return {};
}

std::string aoi_text(double slots, const Units& u) {
    return format_number(slots * u.scale) + " " + u.label;
}

void warn_short(std::ostream& err, const char* what, bool short_block) {
    if (short_block) err << "warning: " << what << " blocklength below " << kTightBlocklength
                         << "; normal approximation is loose\n";
}

void print_scenario(std::ostream& out, const Scenario& sc) {
    out << "scenario: N=" << sc.num_sensors << " L_h=" << sc.per_sensor_bits << " alpha=" << sc.redundancy_bits
        << " R=" << format_number(sc.coding_rate) << " snr=" << format_number(sc.channel.snr_linear) << " ("
        << format_number(snr_to_db(sc.channel.snr_linear)) << " dB)\n";
}

int cmd_analyze(const Command& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Scenario& sc = cfg.scenario;
    const EvalOptions eval = eval_options(cmd);
    const Units u = units_for(cmd, sc);
    print_scenario(out, sc);

    double joint_aoi = std::numeric_limits<double>::infinity();
    double dist_aoi = std::numeric_limits<double>::infinity();
    out << "joint: L=" << sc.joint_bits() << " M=" << sc.joint_blocklength();
    try {
        const AnalyticResult j = avg_aoi_joint(sc, eval);
        joint_aoi = j.avg_aoi_slots;
        out << " eps=" << format_number(j.error_rate) << " aoi=" << aoi_text(j.avg_aoi_slots, u) << "\n";
        warn_short(err, "joint", j.short_block);
    } catch (const UnboundedAoi& e) {
        out << " eps=" << format_number(e.error_rate()) << " aoi=unbounded\n";
    }
    out << "distributed: L_h=" << sc.per_sensor_bits << " M_h=" << sc.sensor_blocklength();
    try {
        const AnalyticResult d = avg_aoi_distributed(sc, eval);
        dist_aoi = d.avg_aoi_slots;
        out << " eps=" << format_number(d.error_rate) << " sigma=" << format_number(d.sigma)
            << " beta=" << format_number(d.beta) << " aoi=" << aoi_text(d.avg_aoi_slots, u) << "\n";
        warn_short(err, "distributed", d.short_block);
    } catch (const UnboundedAoi& e) {
        out << " eps=" << format_number(e.error_rate()) << " aoi=unbounded\n";
    }
    const ThresholdResult t = alpha_threshold(sc, eval);
    out << "alpha_0: " << format_number(t.alpha_0) << " bits\n";
    out << "aoi_difference_approx: " << aoi_text(t.aoi_diff, u) << "\n";
    out << "preferred_scheme: " << to_string(t.preferred) << "\n";
    if (std::isfinite(joint_aoi) || std::isfinite(dist_aoi)) {
        out << "exact_preferred_scheme: " << to_string(preference_from_exact(joint_aoi, dist_aoi)) << "\n";
    }
    if (t.outside_low_error_regime) {
        err << "warning: sensor error rate " << format_number(t.sensor_error_rate) << " exceeds "
            << format_number(kLowErrorRegime) << "; the alpha_0 approximation assumes a low error rate\n";
    }
    return kExitOk;
}

std::vector<Scheme> selected_schemes(const Command& cmd, SchemeSelection fallback) {
    const SchemeSelection sel = cmd.given("--scheme") ? parse_scheme_selection(cmd.value("--scheme")) : fallback;
    if (sel == SchemeSelection::Joint) return {Scheme::Joint};
    if (sel == SchemeSelection::Distributed) return {Scheme::Distributed};
    return {Scheme::Joint, Scheme::Distributed};
}

int cmd_simulate(const Command& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Scenario& sc = cfg.scenario;
    const EvalOptions eval = eval_options(cmd);
    SimSettings st = cfg.settings;
    apply_sim_options(cmd, eval, st);
    const Units u = units_for(cmd, sc);
    print_scenario(out, sc);
    for (Scheme scheme : selected_schemes(cmd, SchemeSelection::Both)) {
        const SimResult r = simulate(scheme, sc, st);
        out << to_string(scheme) << ": blocklength=" << r.blocklength << " eps=" << format_number(r.error_rate)
            << " sim_aoi=" << aoi_text(r.avg_aoi_slots, u) << " ci95=" << aoi_text(r.ci95_half_width, u)
            << " frames=" << st.frames << " warmup=" << st.warmup_frames << " replications=" << st.replications
            << " seed=" << st.seed;
        try {
            out << " analytic=" << aoi_text(avg_aoi(scheme, sc, eval).avg_aoi_slots, u) << "\n";
        } catch (const UnboundedAoi&) {
            out << " analytic=unbounded\n";
        }
        if (r.blocklength < kTightBlocklength && !eval.forced_error_rate) warn_short(err, to_string(scheme).c_str(), true);
    }
    return kExitOk;
}

int cmd_sweep(const Command& cmd, const RunConfig& cfg, std::ostream& out, std::ostream&) {
    SweepSpec spec;
    if (cmd.given("--figure")) {
        if (cmd.given("--vary") || cmd.given("--grid")) {
            throw ConfigError("--figure", "cannot be combined with --vary/--grid");
        }
        const std::string& fig = cmd.value("--figure");
        if (fig == "3") spec = figure3_spec(cfg.scenario);
        else if (fig == "4") spec = figure4_spec(cfg.scenario);
        else if (fig == "5") spec = figure5_spec(cfg.scenario);
        else throw ConfigError("--figure", "must be 3, 4 or 5");
    } else {
        if (!cmd.given("--vary") || !cmd.given("--grid")) {
            throw ConfigError("--vary", "sweep needs --figure or both --vary and --grid");
        }
        spec.base = cfg.scenario;
        spec.swept_variable = parse_swept_variable(cmd.value("--vary"));
        spec.grid = parse_grid(cmd.value("--grid"));
    }
    if (cmd.given("--scheme")) spec.scheme = parse_scheme_selection(cmd.value("--scheme"));
    spec.eval = eval_options(cmd);
    spec.with_simulation = cmd.on("--simulate");
    spec.sim = cfg.settings;
    apply_sim_options(cmd, spec.eval, spec.sim);

    const auto rows = run_sweep(spec);
    if (cmd.output_path.empty()) {
        emit_csv(rows, out);
    } else {
        emit_csv_file(rows, cmd.output_path);
    }
    return kExitOk;
}

int cmd_optimize(const Command& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Scenario& sc = cfg.scenario;
    const EvalOptions eval = eval_options(cmd);
    const Units u = units_for(cmd, sc);
    const auto schemes = selected_schemes(cmd, SchemeSelection::Joint);
    if (schemes.size() != 1) throw ConfigError("--scheme", "optimize takes joint or distributed");
    const Scheme scheme = schemes.front();
    const std::int64_t bits = scheme == Scheme::Joint ? sc.joint_bits() : sc.per_sensor_bits;
    IntRange range{1, std::min<std::int64_t>(1'000'000, 10 * bits)};
    if (cmd.given("--min")) range.lo = parse_int_flag("--min", cmd.value("--min"));
    if (cmd.given("--max")) range.hi = parse_int_flag("--max", cmd.value("--max"));

    const Optimum best = optimize_blocklength(scheme, bits, sc.num_sensors, sc.channel, range, eval);
    out << "scheme: " << to_string(scheme) << " bits=" << bits << "\n";
    out << "searched_range: [" << range.lo << ", " << range.hi << "]\n";
    out << "best_blocklength: " << best.best_blocklength << "\n";
    out << "best_rate: " << format_number(static_cast<double>(bits) / static_cast<double>(best.best_blocklength))
        << "\n";
    out << "best_aoi: " << aoi_text(best.best_aoi_slots, u) << "\n";
    if (best.at_range_boundary) {
        out << "boundary: minimum at range boundary\n";
        err << "warning: minimum at range boundary; widen --min/--max\n";
    }
    if (cmd.given("--profile")) {
        const std::string& path = cmd.value("--profile");
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + path + ": " + std::strerror(errno));
        emit_profile_csv(best, f);
        if (!f) throw std::runtime_error("write failed for " + path);
    }
    return kExitOk;
}

int cmd_compare(const Command& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Scenario& sc = cfg.scenario;
    const EvalOptions eval = eval_options(cmd);
    IntRange range{0, sc.num_sensors * sc.per_sensor_bits - 1};
    if (cmd.given("--alpha-min")) range.lo = parse_int_flag("--alpha-min", cmd.value("--alpha-min"));
    if (cmd.given("--alpha-max")) range.hi = parse_int_flag("--alpha-max", cmd.value("--alpha-max"));
    print_scenario(out, sc);
    const ThresholdResult t = alpha_threshold(sc, eval);
    const double crossover = locate_crossover(sc, range, eval);
    out << "alpha_0: " << format_number(t.alpha_0) << " bits\n";
    out << "exact_crossover: " << format_number(crossover) << " bits\n";
    out << "difference: " << format_number(std::fabs(crossover - t.alpha_0)) << " bits\n";
    out << "preferred_scheme: " << to_string(t.preferred) << "\n";
    if (t.outside_low_error_regime) {
        err << "warning: sensor error rate " << format_number(t.sensor_error_rate)
            << " is outside the low-error regime\n";
    }
    return kExitOk;
}

std::string usage_text(CLI::App& app) {
    return app.help();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Average age of information for joint vs distributed short-packet encoding", "aoi"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto analyze = make_command(app, "analyze", "closed-form AoI of one scenario for both schemes", false);
    analyze->option("--forced-error", "override the block error rate of every packet");
    analyze->flag("--printed-dispersion", "use the (1 + snr^2) dispersion variant");
    analyze->flag("--seconds", "report ages in seconds (slots * slot_duration)");

    auto simulate_cmd = make_command(app, "simulate", "Monte Carlo AoI of one scenario", false);
    simulate_cmd->option("--scheme", "joint, distributed or both");
    simulate_cmd->option("--forced-error", "override the block error rate of every packet");
    simulate_cmd->option("--threads", "worker threads (0 = all cores)");
    simulate_cmd->flag("--slot-level", "step every slot instead of whole frames");
    simulate_cmd->flag("--audit", "slot-level run checking age bookkeeping invariants");
    simulate_cmd->flag("--printed-dispersion", "use the (1 + snr^2) dispersion variant");
    simulate_cmd->flag("--seconds", "report ages in seconds");

    auto sweep = make_command(app, "sweep", "parameter sweep to CSV", true);
    sweep->option("--figure", "replica of the published experiment: 3 (rate), 4 (sensors), 5 (alpha)");
    sweep->option("--vary", "rate, sensors, alpha or blocklength");
    sweep->option("--grid", "start:stop:step or comma-separated values");
    sweep->option("--scheme", "joint, distributed or both");
    sweep->option("--forced-error", "override the block error rate of every packet");
    sweep->option("--threads", "worker threads for simulation");
    sweep->flag("--simulate", "attach Monte Carlo estimates to each row");
    sweep->flag("--printed-dispersion", "use the (1 + snr^2) dispersion variant");

    auto optimize = make_command(app, "optimize", "exhaustive blocklength search", false);
    optimize->option("--scheme", "joint or distributed");
    optimize->option("--min", "smallest blocklength searched");
    optimize->option("--max", "largest blocklength searched");
    optimize->option("--profile", "write the (blocklength, AoI) profile CSV here");
    optimize->option("--forced-error", "override the block error rate of every packet");
    optimize->flag("--printed-dispersion", "use the (1 + snr^2) dispersion variant");
    optimize->flag("--seconds", "report ages in seconds");

    auto compare = make_command(app, "compare", "exact crossover vs the alpha_0 threshold", false);
    compare->option("--alpha-min", "lower end of the alpha bracket");
    compare->option("--alpha-max", "upper end of the alpha bracket");
    compare->option("--forced-error", "override the block error rate of every packet");
    compare->flag("--printed-dispersion", "use the (1 + snr^2) dispersion variant");

    std::string replay_path;
    std::string replay_output;
    CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
    replay->add_option("manifest", replay_path, "manifest JSON written by --manifest")->required();
    replay->add_option("--output,-o", replay_output, "CSV destination for sweep manifests");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << usage_text(app);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << usage_text(app);
        return kExitValidation;
    }

    try {
        if (replay->parsed()) {
            const RunManifest m = read_manifest(replay_path);
            auto argv = replay_arguments(m);
            if (!replay_output.empty()) {
                argv.push_back("--output");
                argv.push_back(replay_output);
            }
            return run_cli(argv, out, err);
        }

        const std::pair<Command*, int (*)(const Command&, const RunConfig&, std::ostream&, std::ostream&)>
            commands[] = {{analyze.get(), cmd_analyze},
                          {simulate_cmd.get(), cmd_simulate},
                          {sweep.get(), cmd_sweep},
                          {optimize.get(), cmd_optimize},
                          {compare.get(), cmd_compare}};
        for (const auto& [cmd, fn] : commands) {
            if (!cmd->app->parsed()) continue;
            const KeyValues file = cmd->config_path.empty() ? KeyValues{} : read_config_file(cmd->config_path);
            const RunConfig cfg = resolve_config(file, cmd->flag_layer());
            const int rc = fn(*cmd, cfg, out, err);
            if (rc == kExitOk && !cmd->manifest_path.empty()) {
                RunManifest m;
                m.command = cmd->app->get_name();
                m.config = cfg;
                m.args = cmd->canonical_args();
                m.timestamp = iso8601_now();
                write_manifest(m, cmd->manifest_path);
            }
            return rc;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << usage_text(app);
    return kExitValidation;
}

}  // namespace aoi
