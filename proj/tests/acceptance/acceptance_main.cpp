// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memfuse/calibration.hpp"
#include "memfuse/detector.hpp"
#include "memfuse/loadline.hpp"
#include "oracles.hpp"

using namespace memfuse;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

FuseState table_fuse(Ohms r_m2, Ohms r_m1) {
    FuseState f = preset_fuse();
    f.fwd.r = r_m2;
    f.rev.r = r_m1;
    return f;
}

// Shared regime search used by criteria 4, 5, 7 and 11.
struct Regime {
    std::vector<ScanEntry> positive;  // qualifying, from negative saturation
    std::vector<ScanEntry> negative;  // qualifying, from positive saturation
    double seconds = 0.0;

    [[nodiscard]] static const ScanEntry* deepest(const std::vector<ScanEntry>& v) {
        const ScanEntry* best = nullptr;
        for (const auto& e : v) {
            if (best == nullptr || e.metrics.dip_depth > best->metrics.dip_depth) best = &e;
        }
        return best;
    }
};

constexpr long kDipBudget = 5000;
constexpr Ohms kMinDip = 50.0;

Regime find_regime() {
    const auto t0 = Clock::now();
    ScanOptions opt;
    opt.min_dip = kMinDip;
    opt.recovery_tolerance = 0.05;
    const auto pos_grid = amplitude_grid(0.01, 5.0, 0.01);
    const auto neg_grid = amplitude_grid(-0.01, -5.0, 0.01);
    const auto pos = scan_amplitudes(saturate(preset_fuse(), -1), pos_grid, kDipBudget, ScanCriterion::DipRecovery, opt);
    const auto neg = scan_amplitudes(saturate(preset_fuse(), +1), neg_grid, kDipBudget, ScanCriterion::DipRecovery, opt);
    Regime r;
    for (const auto& e : pos) {
        if (e.qualifies) r.positive.push_back(e);
    }
    for (const auto& e : neg) {
        if (e.qualifies) r.negative.push_back(e);
    }
    r.seconds = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------

Outcome c1_switching_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> scale(1.0, 1000.0), th(0.01, 2.0), volt(-6.0, 6.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const SwitchingParams p{scale(rng), -scale(rng), th(rng), -th(rng)};
        const double v = volt(rng);
        const double want = oracle::switching_delta(p.a_plus, p.a_minus, p.v_th_plus, p.v_th_minus, v);
        worst = std::max(worst, rel_err(switching_delta(p, v), want));
    }
    bool dead_zero = true;
    for (const auto& p : {preset("M1").params, preset("M2").params}) {
        for (int i = 0; i <= 100000; ++i) {
            const double v = p.v_th_minus + (p.v_th_plus - p.v_th_minus) * i / 100000.0;
            dead_zero = dead_zero && switching_delta(p, v) == 0.0;
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && dead_zero && secs < 1.0,
            fmt("max rel err %.3g, dead zone %s, %.3f s", worst, dead_zero ? "zero" : "NONZERO", secs)};
}

Outcome c2_presets() {
    const auto m1 = preset("M1");
    const auto m2 = preset("M2");
    const bool ok = m1.params.a_plus == 235.2 && m1.params.a_minus == -91.8 && m1.params.v_th_plus == 1.07 &&
                    m1.params.v_th_minus == -0.52 && m1.bounds.r_floor == 3000.0 && m1.bounds.r_ceiling == 3600.0 &&
                    m2.params.a_plus == 439.4 && m2.params.a_minus == -298.2 && m2.params.v_th_plus == 0.71 &&
                    m2.params.v_th_minus == -0.45 && m2.bounds.r_floor == 4100.0 && m2.bounds.r_ceiling == 4900.0;
    return {ok, fmt("M1 (%g, %g, %g, %g) [%g, %g]; M2 (%g, %g, %g, %g) [%g, %g]", m1.params.a_plus,
                    m1.params.a_minus, m1.params.v_th_plus, m1.params.v_th_minus, m1.bounds.r_floor,
                    m1.bounds.r_ceiling, m2.params.a_plus, m2.params.a_minus, m2.params.v_th_plus,
                    m2.params.v_th_minus, m2.bounds.r_floor, m2.bounds.r_ceiling)};
}

Outcome c3_divider() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> r2(4100, 4900), r1(3000, 3600), vb(-5, 5);
    double worst_rel = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto f = table_fuse(r2(rng), r1(rng));
        const double v = vb(rng);
        if (v == 0.0) continue;
        worst_rel = std::max(worst_rel, rel_err(solve_divider(f, v), oracle::divider(f.fwd.r, f.rev.r, v)));
    }

    std::uniform_real_distribution<double> c(0.0, 0.5), r(1000, 8000);
    double worst_residual = 0.0;
    for (int i = 0; i < 10000; ++i) {
        FuseState f = table_fuse(r2(rng), r1(rng));
        f.fwd.bounds = f.rev.bounds = {500, 10000};
        f.fwd.r = r(rng);
        f.rev.r = r(rng);
        f.fwd.iv = AsymmetricIV{c(rng), c(rng)};
        f.rev.iv = (i % 2) ? IVModel{OddPolynomialIV{c(rng)}} : IVModel{AsymmetricIV{c(rng), c(rng)}};
        worst_residual = std::max(worst_residual, std::abs(solve_divider_detailed(f, vb(rng)).residual));
    }

    double worst_sym = 0.0;
    for (double coeff : {0.0, 0.2, 0.5}) {
        FuseState f = table_fuse(4500, 3300);
        f.fwd.switching = f.rev.switching = SwitchingParams{300.0, -300.0, 0.6, -0.6};
        f.fwd.bounds = f.rev.bounds = {1000, 9000};
        f.fwd.r = f.rev.r = 4000;
        f.fwd.iv = f.rev.iv = OddPolynomialIV{coeff};
        for (int i = -50; i <= 50; ++i) {
            const double v = 0.1 * i;
            worst_sym = std::max(worst_sym, std::abs(solve_divider(f, v) - v / 2));
        }
    }
    return {worst_rel < 1e-9 && worst_residual < 1e-12 && worst_sym <= 1e-9,
            fmt("linear max rel %.3g, nonlinear max residual %.3g A, symmetric max |v_x - v_b/2| %.3g V", worst_rel,
                worst_residual, worst_sym)};
}

Outcome c4_dip_recovery(const Regime& r) {
    const auto* p = Regime::deepest(r.positive);
    const auto* n = Regime::deepest(r.negative);
    std::ostringstream d;
    d << r.positive.size() << " positive and " << r.negative.size() << " negative amplitudes qualify";
    if (p != nullptr && n != nullptr) {
        d << fmt("; deepest +%.2f V (dip %.1f, final %+.1f ohm), %.2f V (dip %.1f, final %+.1f ohm)", p->amplitude,
                 p->metrics.dip_depth, p->metrics.recovery, n->amplitude, n->metrics.dip_depth, n->metrics.recovery);
    }
    d << fmt("; %.2f s", r.seconds);
    return {p != nullptr && n != nullptr && r.seconds < 10.0, d.str()};
}

Outcome c5_asymmetry(const Regime& r) {
    const auto* p = Regime::deepest(r.positive);
    const auto* n = Regime::deepest(r.negative);
    if (p == nullptr || n == nullptr) return {false, "no qualifying amplitudes"};
    long pairs = 0, ordered = 0;
    for (const auto& a : r.positive) {
        for (const auto& b : r.negative) {
            ++pairs;
            ordered += b.metrics.dip90_index < a.metrics.dip90_index ? 1 : 0;
        }
    }
    const bool chosen = n->metrics.dip90_index < p->metrics.dip90_index;
    return {chosen && ordered == pairs,
            fmt("90%% of dip after %ld pulses (negative, %.2f V) vs %ld (positive, +%.2f V); ordered in %ld/%ld pairs",
                n->metrics.dip90_index + 1, n->amplitude, p->metrics.dip90_index + 1, p->amplitude, ordered, pairs)};
}

Outcome c6_selective() {
    const auto t0 = Clock::now();
    const FuseState base = preset_fuse();
    ScanOptions opt;
    opt.selective_floor = 100.0;
    opt.isolation_tolerance = 0.01;  // 6 ohm of M1's range

    // Negative single-train selectivity at 500 pulses.
    const auto neg_grid = amplitude_grid(-0.01, -5.0, 0.01);
    const auto neg = scan_amplitudes(base, neg_grid, 500, ScanCriterion::SelectiveFwd, opt);
    const ScanEntry* single = nullptr;
    for (const auto& e : neg) {
        if (e.qualifies && (single == nullptr || e.metrics.total_dr_fwd > single->metrics.total_dr_fwd)) single = &e;
    }

    // Bipolar cycle: raise M2 alone, then lower it alone.
    constexpr long kCycleBudget = 2000;
    const auto pos_grid = amplitude_grid(0.5, 5.0, 0.001);
    const auto up = scan_amplitudes(base, pos_grid, kCycleBudget, ScanCriterion::SelectiveFwd, opt);
    const ScanEntry* reset = nullptr;
    for (const auto& e : up) {
        if (e.qualifies && (reset == nullptr || e.metrics.total_dr_rev < reset->metrics.total_dr_rev)) reset = &e;
    }

    std::optional<double> m1_cycle;
    double m2_up = 0.0, m2_down = 0.0, set_amp = 0.0;
    if (reset != nullptr) {
        const auto [mid, t_up] = run_pulse_train(base, std::vector<PulseTrain>{{reset->amplitude, kCycleBudget}});
        const auto down = scan_amplitudes(mid, neg_grid, kCycleBudget, ScanCriterion::SelectiveFwd, opt);
        const ScanEntry* set = nullptr;
        for (const auto& e : down) {
            if (e.qualifies && e.metrics.total_dr_rev + reset->metrics.total_dr_rev < 6.0 &&
                (set == nullptr || e.metrics.total_dr_fwd > set->metrics.total_dr_fwd)) {
                set = &e;
            }
        }
        if (set != nullptr) {
            m1_cycle = reset->metrics.total_dr_rev + set->metrics.total_dr_rev;
            m2_up = reset->metrics.total_dr_fwd;
            m2_down = set->metrics.total_dr_fwd;
            set_amp = set->amplitude;
        }
    }
    const double secs = seconds_since(t0);

    std::ostringstream d;
    if (single != nullptr) {
        d << fmt("%.2f V x500: dM2 %.1f, dM1 %.2f ohm", single->amplitude, single->metrics.total_dr_fwd,
                 single->metrics.total_dr_rev);
    } else {
        d << "no selective negative amplitude";
    }
    if (m1_cycle) {
        d << fmt("; cycle +%.3f V then %.2f V x%ld: dM2 +%.1f/-%.1f, dM1 %.2f ohm", reset->amplitude, set_amp,
                 kCycleBudget, m2_up, m2_down, *m1_cycle);
    } else {
        d << "; no isolated bipolar cycle";
    }
    d << fmt("; %.2f s", secs);
    return {single != nullptr && m1_cycle.has_value() && *m1_cycle < 6.0 && secs < 10.0, d.str()};
}

Outcome c7_monotone_vx(const Regime& r) {
    const auto* p = Regime::deepest(r.positive);
    if (p == nullptr) return {false, "no qualifying positive amplitude"};
    const auto [end, traj] =
        run_pulse_train(saturate(preset_fuse(), -1), std::vector<PulseTrain>{{p->amplitude, kDipBudget}});
    long decreases = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& rec : traj.records) {
        decreases += rec.v_x < prev ? 1 : 0;
        prev = rec.v_x;
    }
    return {decreases == 0, fmt("+%.2f V x%zu: %ld decreasing steps, v_x %.6f -> %.6f V", p->amplitude,
                                traj.records.size(), decreases, traj.records.front().v_x, traj.records.back().v_x)};
}

Outcome c8_fixed_points() {
    auto cubic = [](double a, Ohms r) {
        MemristorState s;
        s.r = r;
        s.bounds = {500, 20000};
        s.switching = OddCubicSwitching{a};
        return s;
    };
    bool ok = true;
    double worst = 0.0;
    for (double a : {30.0, -30.0}) {
        for (double v_b : {0.8, 2.0, -1.5, 4.0}) {
            const FuseState f{cubic(a, 3000), cubic(a, 3000), Connection::Series};
            const auto rep = find_fixed_points(f, v_b, FixedPointBasis::DriftZero);
            const auto sw = find_fixed_points(exchanged(f), v_b, FixedPointBasis::DriftZero);
            if (rep.points.size() != 1 || sw.points.size() != 1) {
                ok = false;
                continue;
            }
            worst = std::max(worst, std::abs(rep.points[0].v_x_star - v_b / 2));
            // Exchange maps v_x to v_b - v_x.
            worst = std::max(worst, std::abs((v_b - sw.points[0].v_x_star) - v_b / 2));
            ok = ok && rep.points[0].kind == sw.points[0].kind;
        }
    }
    ok = ok && worst <= 1e-6;

    long table_points = 0;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r2(4100, 4900), r1(3000, 3600), vb(1.24, 5.0);
    for (int i = 0; i < 200; ++i) {
        const auto f = table_fuse(r2(rng), r1(rng));
        const double v = vb(rng);
        table_points += static_cast<long>(find_fixed_points(f, v, FixedPointBasis::DriftZero).points.size());
        table_points += static_cast<long>(find_fixed_points(f, -v, FixedPointBasis::DriftZero).points.size());
    }
    ok = ok && table_points == 0;
    return {ok, fmt("cubic pair max |v_x* - v_b/2| %.3g V, exchange-symmetric kinds; preset pair: %ld fixed points",
                    worst, table_points)};
}

Outcome c9_fit_round_trip() {
    const auto t0 = Clock::now();
    const SwitchingParams m1 = preset("M1").params;
    const auto ramp = amplitude_grid(-2.0, 2.5, 0.05);
    const auto fit = fit_switching_params(synthetic_samples(m1, ramp));
    double worst = std::numeric_limits<double>::infinity();
    if (fit.complete()) {
        const auto p = fit.params();
        worst = std::max({rel_err(p.a_plus, m1.a_plus), rel_err(p.a_minus, m1.a_minus),
                          rel_err(p.v_th_plus, m1.v_th_plus), rel_err(p.v_th_minus, m1.v_th_minus)});
    }
    const auto mc = monte_carlo_fit(m1, ramp, 5.0, 100, 0);
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && mc.within_tolerance >= 95 && secs < 30.0,
            fmt("noiseless max rel err %.3g; noisy %d/100 within tolerance; %.2f s", worst, mc.within_tolerance, secs)};
}

Outcome c10_nonadditive_readout() {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> r2(4100, 4900), r1(3000, 3600), c(0.0, 1.0);
    double min_gap = std::numeric_limits<double>::infinity();
    double max_linear_gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
        FuseState f = table_fuse(r2(rng), r1(rng));
        max_linear_gap = std::max(max_linear_gap, std::abs(fuse_read_resistance(f) - (f.fwd.r + f.rev.r)));
        double c_fwd = c(rng), c_rev = c(rng);
        if (c_fwd == c_rev) c_rev = 0.0;
        f.fwd.iv = AsymmetricIV{c_fwd, c_rev};
        if (i % 2) f.rev.iv = AsymmetricIV{c_rev, c_fwd};
        min_gap = std::min(min_gap, std::abs(fuse_read_resistance(f) - (f.fwd.r + f.rev.r)));
    }
    return {min_gap > 0.0 && max_linear_gap == 0.0,
            fmt("asymmetric min |gap| %.3g ohm; linear max |gap| %g ohm", min_gap, max_linear_gap)};
}

Outcome c11_detector(const Regime& r) {
    const auto* p = Regime::deepest(r.positive);
    const auto* n = Regime::deepest(r.negative);
    if (p == nullptr || n == nullptr) return {false, "no qualifying amplitudes"};
    std::vector<Volts> events(800, p->amplitude);
    events.insert(events.end(), 100, n->amplitude);
    const auto start = saturate(preset_fuse(), +1);
    const auto run = run_detector(start, events);

    const auto steady_pos = run_detector(start, std::vector<Volts>(900, p->amplitude));
    const auto steady_neg = run_detector(saturate(preset_fuse(), -1), std::vector<Volts>(900, n->amplitude));
    const bool one_in_segment = run.events.size() == 1 && run.events[0].pulse_index >= 800;
    const bool quiet = steady_pos.events.empty() && steady_neg.events.empty();
    return {one_in_segment && quiet,
            fmt("+%.2f V x800 then %.2f V x100: %zu detection(s)%s; constant streams: %zu + %zu", p->amplitude,
                n->amplitude, run.events.size(),
                run.events.empty() ? "" : fmt(" at pulse %ld", run.events[0].pulse_index).c_str(),
                steady_pos.events.size(), steady_neg.events.size())};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> check;
    };
    std::optional<Regime> regime;
    auto shared = [&]() -> const Regime& {
        if (!regime) regime = find_regime();
        return *regime;
    };

    const std::vector<Criterion> criteria{
        {1, "switching function matches the scalar oracle", c1_switching_oracle},
        {2, "device presets", c2_presets},
        {3, "divider solver", c3_divider},
        {4, "dip-and-recovery in both polarities", [&] { return c4_dip_recovery(shared()); }},
        {5, "negative dip is sharper", [&] { return c5_asymmetry(shared()); }},
        {6, "selective control of M2", c6_selective},
        {7, "v_x nondecreasing under positive train", [&] { return c7_monotone_vx(shared()); }},
        {8, "fixed-point analysis", c8_fixed_points},
        {9, "fit round trip", c9_fit_round_trip},
        {10, "fuse read-out nonadditivity", c10_nonadditive_readout},
        {11, "step detector end to end", [&] { return c11_detector(shared()); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
