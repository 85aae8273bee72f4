#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>

#include "CLI11.hpp"
#include "memfuse/calibration.hpp"
#include "memfuse/detector.hpp"
#include "memfuse/io.hpp"
#include "memfuse/loadline.hpp"

namespace memfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

/// Flag value when given on the command line, else config[key], else fallback.
template <class T>
T resolve(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key, const T& fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (cfg.contains(key)) return cfg.at(key).get<T>();
    return fallback;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config file '" + path + "'");
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw ParseError("config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
}

std::ofstream open_output(const Common& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    const fs::path p = fs::path(c.out_dir) / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
    return os;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    return in;
}

json with_seed(json resolved, const Common& c) {
    if (c.seed) resolved["seed"] = *c.seed;
    return resolved;
}

// --- subcommands -------------------------------------------------------------

struct CharacterizeArgs {
    std::string preset = "M1";
    double ramp_min = -2.0, ramp_max = 2.5, ramp_step = 0.05;
    long pulses = 1;
    bool bounded = false;
    double noise = 0.0;
    CLI::Option *o_preset{}, *o_min{}, *o_max{}, *o_step{}, *o_pulses{}, *o_noise{};
};

int do_characterize(const CharacterizeArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    json dev_cfg = cfg.value("device", json::object());
    const std::string name = resolve(a.o_preset, a.preset, dev_cfg, "preset", std::string("M1"));
    dev_cfg["preset"] = name;
    MemristorState dev = io::device_from_json(dev_cfg, name);
    const bool bounded = a.bounded || cfg.value("bounded", false);
    if (!bounded) {
        // Free-running characterisation: the operating range would clip the ramp.
        dev.bounds = {1e-3, 1e12};
    }
    const double lo = resolve(a.o_min, a.ramp_min, cfg, "ramp_min", -2.0);
    const double hi = resolve(a.o_max, a.ramp_max, cfg, "ramp_max", 2.5);
    const double step = resolve(a.o_step, a.ramp_step, cfg, "ramp_step", 0.05);
    const long pulses = resolve(a.o_pulses, a.pulses, cfg, "pulses_per_train", 1L);
    const double noise = resolve(a.o_noise, a.noise, cfg, "noise", 0.0);

    const auto ramp = amplitude_grid(lo, hi, step);
    auto samples = run_characterization(dev, ramp, pulses);
    if (noise > 0.0) {
        std::mt19937_64 rng(c.seed.value_or(0));
        std::uniform_real_distribution<double> jitter(-noise, noise);
        for (auto& s : samples) s.delta_r += jitter(rng);
    }

    json resolved = {{"command", "characterize"}, {"device", io::to_json(dev)}, {"ramp_min", lo},
                     {"ramp_max", hi},           {"ramp_step", step},           {"pulses_per_train", pulses},
                     {"bounded", bounded},       {"noise", noise}};
    auto os = open_output(c, "sensitivity.csv");
    io::write_sensitivity_csv(os, samples, with_seed(resolved, c));
    out << "wrote " << (fs::path(c.out_dir) / "sensitivity.csv").string() << " (" << samples.size() << " samples)\n";
    return kOk;
}

struct FitArgs {
    std::string input;
    double grid_step = 0.01;
    CLI::Option *o_input{}, *o_step{};
};

int do_fit(const FitArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    const std::string input = resolve(a.o_input, a.input, cfg, "input", std::string());
    if (input.empty()) throw ParseError("fit needs --input <sensitivity.csv>");
    auto in = open_input(input);
    const auto data = io::read_sensitivity_csv(in);
    FitOptions opt;
    opt.grid_step = resolve(a.o_step, a.grid_step, cfg, "grid_step", 0.01);
    const FitResult fit = fit_switching_params(data, opt);
    const json doc = io::fit_to_json(fit);
    auto os = open_output(c, "fit.json");
    os << doc.dump(2) << '\n';
    out << doc.dump() << '\n';
    return fit.complete() ? kOk : kFitFailed;
}

struct LoadlineArgs {
    double v_b = 0.0;
    int samples = 1001;
    double epsilon = kDefaultBottleneckEpsilon;
    CLI::Option *o_vb{}, *o_samples{}, *o_eps{};
};

int do_loadline(const LoadlineArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    if ((a.o_vb == nullptr || a.o_vb->count() == 0) && !cfg.contains("v_b")) {
        throw ParseError("loadline needs --vb or a 'v_b' config key");
    }
    const double v_b = resolve(a.o_vb, a.v_b, cfg, "v_b", 0.0);
    const int samples = resolve(a.o_samples, a.samples, cfg, "samples", 1001);
    const double eps = resolve(a.o_eps, a.epsilon, cfg, "epsilon", kDefaultBottleneckEpsilon);
    const FuseState fuse = io::fuse_from_json(cfg);

    const LoadLine line = build_load_line(fuse.fwd.switching, fuse.rev.switching, v_b, samples, fuse.connection);
    const Bottleneck bn = find_bottleneck(line, eps);

    json report;
    report["v_b"] = v_b;
    report["epsilon"] = eps;
    report["bottleneck"] = json::array();
    for (const auto& iv : bn.intervals) report["bottleneck"].push_back({iv.lo, iv.hi});
    report["fixed_points"] = json::array();
    bool degenerate = false;
    for (auto basis : {FixedPointBasis::CurveCrossing, FixedPointBasis::DriftZero}) {
        const auto fp = find_fixed_points(fuse, v_b, basis);
        degenerate = degenerate || fp.degenerate_bias;
        for (const auto& p : fp.points) {
            report["fixed_points"].push_back(
                {{"v_x", p.v_x_star}, {"kind", to_string(p.kind)}, {"basis", to_string(p.basis)}});
        }
    }
    report["degenerate_bias"] = degenerate;
    report["v_x"] = solve_divider(fuse, v_b);
    report["drift"] = drift(fuse, v_b);

    json resolved = {{"command", "loadline"}, {"v_b", v_b}, {"samples", samples}, {"epsilon", eps},
                     {"fuse", io::to_json(fuse)}};
    auto os = open_output(c, "loadline.csv");
    io::write_load_line_csv(os, line, with_seed(resolved, c));
    auto rep = open_output(c, "loadline_report.json");
    rep << report.dump(2) << '\n';
    out << report.dump() << '\n';
    return kOk;
}

struct SimulateArgs {
    std::vector<std::string> trains;
    CLI::Option* o_train{};
};

std::vector<PulseTrain> parse_train_flags(const std::vector<std::string>& flags) {
    std::vector<PulseTrain> out;
    for (const auto& f : flags) {
        const auto colon = f.find(':');
        if (colon == std::string::npos) throw ParseError("train must be 'amplitude:count', got '" + f + "'");
        try {
            PulseTrain t;
            t.amplitude = std::stod(f.substr(0, colon));
            t.count = std::stol(f.substr(colon + 1));
            t.validate();
            out.push_back(t);
        } catch (const std::logic_error&) {
            throw ParseError("bad train '" + f + "'");
        }
    }
    return out;
}

int do_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    const FuseState fuse = io::fuse_from_json(cfg);
    std::vector<PulseTrain> trains;
    if (a.o_train->count() > 0) {
        trains = parse_train_flags(a.trains);
    } else if (cfg.contains("trains")) {
        trains = io::trains_from_json(cfg.at("trains"));
    } else {
        throw ParseError("simulate needs 'trains' in the config or --train amplitude:count");
    }
    const auto [final_state, traj] = run_pulse_train(fuse, trains);

    json tj = json::array();
    for (const auto& t : trains) tj.push_back({{"amplitude", t.amplitude}, {"count", t.count}, {"width", t.width}});
    json resolved = {{"command", "simulate"}, {"fuse", io::to_json(fuse)}, {"trains", tj}};
    auto os = open_output(c, "trajectory.csv");
    io::write_trajectory_csv(os, traj, with_seed(resolved, c));
    out << "wrote " << (fs::path(c.out_dir) / "trajectory.csv").string() << " (" << traj.records.size()
        << " pulses)\n";
    return kOk;
}

struct ScanArgs {
    std::string criterion = "dip-recovery";
    double amin = 0.0, amax = 4.0, astep = 0.01;
    long pulses = 5000;
    double min_dip = 0.0;
    CLI::Option *o_crit{}, *o_amin{}, *o_amax{}, *o_astep{}, *o_pulses{}, *o_min_dip{};
};

int do_scan(const ScanArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    const FuseState fuse = io::fuse_from_json(cfg);
    const std::string crit_name = resolve(a.o_crit, a.criterion, cfg, "criterion", std::string("dip-recovery"));
    ScanCriterion crit;
    try {
        crit = parse_scan_criterion(crit_name);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    const double amin = resolve(a.o_amin, a.amin, cfg, "amplitude_min", 0.0);
    const double amax = resolve(a.o_amax, a.amax, cfg, "amplitude_max", 4.0);
    const double astep = resolve(a.o_astep, a.astep, cfg, "amplitude_step", 0.01);
    const long pulses = resolve(a.o_pulses, a.pulses, cfg, "pulse_budget", 5000L);
    ScanOptions opt;
    opt.min_dip = resolve(a.o_min_dip, a.min_dip, cfg, "min_dip", 0.0);
    if (cfg.contains("recovery_tolerance")) opt.recovery_tolerance = cfg.at("recovery_tolerance").get<double>();
    if (cfg.contains("isolation_tolerance")) opt.isolation_tolerance = cfg.at("isolation_tolerance").get<double>();
    if (cfg.contains("selective_floor")) opt.selective_floor = cfg.at("selective_floor").get<double>();

    const auto grid = amplitude_grid(amin, amax, astep);
    const auto entries = scan_amplitudes(fuse, grid, pulses, crit, opt);

    json resolved = {{"command", "scan"},
                     {"fuse", io::to_json(fuse)},
                     {"criterion", to_string(crit)},
                     {"amplitude_min", amin},
                     {"amplitude_max", amax},
                     {"amplitude_step", astep},
                     {"pulse_budget", pulses},
                     {"min_dip", opt.min_dip},
                     {"recovery_tolerance", opt.recovery_tolerance},
                     {"isolation_tolerance", opt.isolation_tolerance},
                     {"selective_floor", opt.selective_floor}};
    auto os = open_output(c, "scan.csv");
    io::write_scan_csv(os, entries, with_seed(resolved, c));
    long n_ok = 0;
    for (const auto& e : entries) n_ok += e.qualifies ? 1 : 0;
    out << "scanned " << entries.size() << " amplitudes, " << n_ok << " qualify\n";
    return kOk;
}

struct DetectArgs {
    std::string events;
    double threshold = 0.03;
    long arm_after = 10, refractory = 50;
    CLI::Option *o_events{}, *o_thr{}, *o_arm{}, *o_ref{};
};

int do_detect(const DetectArgs& a, const Common& c, std::ostream& out) {
    const json cfg = load_config(c.config_path);
    const std::string path = resolve(a.o_events, a.events, cfg, "events", std::string());
    if (path.empty()) throw ParseError("detect needs --events <events.csv>");
    auto in = open_input(path);
    const auto events = io::read_events_csv(in);
    const FuseState fuse = io::fuse_from_json(cfg);
    json det_cfg = cfg.value("detector", json::object());
    if (a.o_thr->count() > 0) det_cfg["rel_drop_threshold"] = a.threshold;
    if (a.o_arm->count() > 0) det_cfg["arm_after"] = a.arm_after;
    if (a.o_ref->count() > 0) det_cfg["refractory"] = a.refractory;
    const DetectorConfig dc = io::detector_from_json(det_cfg);

    const DetectorRun run = run_detector(fuse, events, dc);
    json resolved = {{"command", "detect"},
                     {"fuse", io::to_json(fuse)},
                     {"events", path},
                     {"n_events", events.size()},
                     {"detector",
                      {{"rel_drop_threshold", dc.rel_drop_threshold},
                       {"arm_after", dc.arm_after},
                       {"refractory", dc.refractory}}}};
    resolved = with_seed(resolved, c);
    auto det = open_output(c, "detections.csv");
    io::write_detections_csv(det, run.events, resolved);
    auto tr = open_output(c, "trajectory.csv");
    io::write_trajectory_csv(tr, run.trajectory, resolved);
    out << run.events.size() << " detection(s)\n";
    return kOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Memristive fuse simulation and analysis toolkit", "memfuse"};
    app.require_subcommand(1);
    Common common;
    std::uint64_t seed = 0;
    app.add_option("--config", common.config_path, "JSON experiment config");
    app.add_option("--out", common.out_dir, "Output directory");
    auto* o_seed = app.add_option("--seed", seed, "RNG seed (noisy characterisation only)");

    CharacterizeArgs ch;
    auto* sc = app.add_subcommand("characterize", "Pulse-ramp a simulated device, emit sensitivity CSV");
    ch.o_preset = sc->add_option("--preset", ch.preset, "Device preset (M1, M2)");
    ch.o_min = sc->add_option("--ramp-min", ch.ramp_min, "First ramp amplitude (V)");
    ch.o_max = sc->add_option("--ramp-max", ch.ramp_max, "Last ramp amplitude (V)");
    ch.o_step = sc->add_option("--ramp-step", ch.ramp_step, "Ramp step (V)");
    ch.o_pulses = sc->add_option("--pulses", ch.pulses, "Pulses per train");
    ch.o_noise = sc->add_option("--noise", ch.noise, "Uniform noise half-width on delta_r (ohm)");
    sc->add_flag("--bounded", ch.bounded, "Keep the device's operating bounds during the ramp");

    FitArgs fa;
    auto* sf = app.add_subcommand("fit", "Fit switching parameters to a sensitivity CSV");
    fa.o_input = sf->add_option("--input", fa.input, "Sensitivity CSV (v,delta_r[,weight])");
    fa.o_step = sf->add_option("--grid-step", fa.grid_step, "Threshold grid step (V)");

    LoadlineArgs la;
    auto* sl = app.add_subcommand("loadline", "Switching load line, bottleneck and fixed points");
    la.o_vb = sl->add_option("--vb", la.v_b, "Fuse bias (V)");
    la.o_samples = sl->add_option("--samples", la.samples, "Samples across the v_x range");
    la.o_eps = sl->add_option("--epsilon", la.epsilon, "Bottleneck rate threshold (ohm/pulse)");

    SimulateArgs sa;
    auto* ss = app.add_subcommand("simulate", "Run pulse trains, emit trajectory CSV");
    sa.o_train = ss->add_option("--train", sa.trains, "Pulse train 'amplitude:count' (repeatable)");

    ScanArgs ca;
    auto* sn = app.add_subcommand("scan", "Amplitude scan for operating regimes");
    ca.o_crit = sn->add_option("--criterion", ca.criterion, "dip-recovery | selective-fwd | selective-rev");
    ca.o_amin = sn->add_option("--amin", ca.amin, "First amplitude (V)");
    ca.o_amax = sn->add_option("--amax", ca.amax, "Last amplitude (V)");
    ca.o_astep = sn->add_option("--astep", ca.astep, "Amplitude step (V)");
    ca.o_pulses = sn->add_option("--pulses", ca.pulses, "Pulse budget per amplitude");
    ca.o_min_dip = sn->add_option("--min-dip", ca.min_dip, "Minimum dip depth (ohm)");

    DetectArgs da;
    auto* sd = app.add_subcommand("detect", "Step detection over an event stream");
    da.o_events = sd->add_option("--events", da.events, "Events CSV (amplitude)");
    da.o_thr = sd->add_option("--threshold", da.threshold, "Relative drop threshold");
    da.o_arm = sd->add_option("--arm-after", da.arm_after, "Same-polarity events before arming");
    da.o_ref = sd->add_option("--refractory", da.refractory, "Refractory pulses after a detection");

    std::vector<std::string> rev_args(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rev_args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return kUsage;
    }
    if (o_seed->count() > 0) common.seed = seed;

    try {
        if (sc->parsed()) return do_characterize(ch, common, out);
        if (sf->parsed()) return do_fit(fa, common, out);
        if (sl->parsed()) return do_loadline(la, common, out);
        if (ss->parsed()) return do_simulate(sa, common, out);
        if (sn->parsed()) return do_scan(ca, common, out);
        if (sd->parsed()) return do_detect(da, common, out);
    } catch (const ParseError& e) {
        report_error(err, "malformed_input", e.what());
        return kMalformedInput;
    } catch (const json::exception& e) {
        report_error(err, "malformed_input", e.what());
        return kMalformedInput;
    } catch (const InvalidArgument& e) {
        report_error(err, "malformed_input", e.what());
        return kMalformedInput;
    } catch (const ConvergenceError& e) {
        report_error(err, "no_convergence", e.what());
        return kNoConvergence;
    } catch (const FitError& e) {
        report_error(err, "fit_failed", e.what());
        return kFitFailed;
    } catch (const std::exception& e) {
        report_error(err, "failure", e.what());
        return kFailure;
    }
    report_error(err, "usage", "no subcommand");
    return kUsage;
}

}  // namespace memfuse::cli
