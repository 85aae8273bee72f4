#include "memfuse/loadline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "memfuse/roots.hpp"

namespace memfuse {

Ohms LoadLine::fwd_at(Volts v_x) const { return switching_delta(fwd_model, v_x); }

Ohms LoadLine::rev_at(Volts v_x) const { return switching_delta(rev_model, rev_device_bias(connection, v_b, v_x)); }

LoadLine build_load_line(const SwitchingModel& fwd, const SwitchingModel& rev, Volts v_b, int n_samples,
                         Connection connection) {
    if (n_samples < 2) throw InvalidArgument("load line needs at least 2 samples");
    if (!std::isfinite(v_b)) throw InvalidArgument("bias voltage must be finite");
    LoadLine line{v_b, fwd, rev, connection, {}, {}, {}};
    // A zero bias collapses the v_x range to a single point.
    const int n = v_b == 0.0 ? 1 : n_samples;
    const Volts lo = std::min(0.0, v_b);
    const Volts hi = std::max(0.0, v_b);
    line.grid.reserve(n);
    line.delta_fwd.reserve(n);
    line.delta_rev.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Volts v_x = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
        line.grid.push_back(v_x);
        line.delta_fwd.push_back(line.fwd_at(v_x));
        line.delta_rev.push_back(line.rev_at(v_x));
    }
    return line;
}

Bottleneck find_bottleneck(const LoadLine& line, Ohms epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("bottleneck epsilon must be > 0");
    auto inside = [&](Volts v_x) {
        return std::max(std::abs(line.fwd_at(v_x)), std::abs(line.rev_at(v_x))) < epsilon;
    };
    // Boundary between an inside point and an outside point.
    auto edge = [&](Volts in, Volts out) {
        for (int it = 0; it < 200; ++it) {
            const Volts mid = in + 0.5 * (out - in);
            if (mid == in || mid == out) break;
            (inside(mid) ? in : out) = mid;
        }
        return in;
    };

    Bottleneck result;
    const auto& g = line.grid;
    bool open = false;
    Volts start = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool in = inside(g[i]);
        if (in && !open) {
            start = i == 0 ? g[0] : edge(g[i], g[i - 1]);
            open = true;
        } else if (!in && open) {
            result.intervals.push_back({start, edge(g[i - 1], g[i])});
            open = false;
        }
    }
    if (open) result.intervals.push_back({start, g.back()});
    return result;
}

double drift_at(const FuseState& fuse, Volts v_b, Volts v_x) {
    const Ohms r_fwd = fuse.fwd.r;
    const Ohms r_rev = fuse.rev.r;
    const Ohms d_fwd = effective_delta(fuse.fwd, v_x);
    const Ohms d_rev = effective_delta(fuse.rev, rev_device_bias(fuse.connection, v_b, v_x));
    const Ohms total = r_fwd + r_rev;
    return v_b * (r_rev * d_fwd - r_fwd * d_rev) / (total * total);
}

double drift(const FuseState& fuse, Volts v_b) {
    if (is_linear(fuse.fwd.iv) && is_linear(fuse.rev.iv)) {
        return drift_at(fuse, v_b, solve_divider(fuse, v_b));
    }
    const Volts before = solve_divider(fuse, v_b);
    const auto [after_state, rec] = apply_fuse_pulse(fuse, v_b);
    return solve_divider(after_state, v_b) - before;
}

std::string_view to_string(FixedPointKind kind) {
    switch (kind) {
        case FixedPointKind::Attractor: return "attractor";
        case FixedPointKind::Repeller: return "repeller";
        case FixedPointKind::Marginal: return "marginal";
    }
    return "?";
}

std::string_view to_string(FixedPointBasis basis) {
    return basis == FixedPointBasis::CurveCrossing ? "curve-crossing" : "drift-zero";
}

FixedPointReport find_fixed_points(const FuseState& fuse, Volts v_b, FixedPointBasis basis, int scan_samples) {
    FixedPointReport report;
    if (!std::isfinite(v_b)) throw InvalidArgument("bias voltage must be finite");
    if (v_b == 0.0) {
        report.degenerate_bias = true;
        return report;
    }
    if (scan_samples < 3) throw InvalidArgument("fixed-point scan needs at least 3 samples");

    // Signed so that a negative-going zero is always an attractor of v_x.
    auto h = [&](Volts v_x) -> double {
        if (basis == FixedPointBasis::DriftZero) return drift_at(fuse, v_b, v_x);
        const Ohms d_fwd = effective_delta(fuse.fwd, v_x);
        const Ohms d_rev = effective_delta(fuse.rev, rev_device_bias(fuse.connection, v_b, v_x));
        return v_b > 0.0 ? d_fwd - d_rev : d_rev - d_fwd;
    };

    const Volts lo = std::min(0.0, v_b);
    const Volts hi = std::max(0.0, v_b);
    const int n = scan_samples;
    std::vector<Volts> xs(n);
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
        hs[i] = h(xs[i]);
    }

    int last = -1;  // last sample with nonzero h
    for (int i = 0; i < n; ++i) {
        if (hs[i] == 0.0) continue;
        if (last >= 0 && (hs[i] > 0.0) != (hs[last] > 0.0)) {
            Volts root;
            if (i == last + 1) {
                root = roots::bisect(h, xs[last], xs[i], 0.0, kFixedPointTolerance * 1e-3).x;
            } else {
                // Exact zeros on the grid; a run of them is reported at its centre.
                root = 0.5 * (xs[last + 1] + xs[i - 1]);
            }
            const FixedPointKind kind = hs[last] > 0.0 ? FixedPointKind::Attractor : FixedPointKind::Repeller;
            if (root > lo && root < hi) report.points.push_back({root, kind, basis});
        }
        last = i;
    }
    return report;
}

// ---------------------------------------------------------------------------

ScanCriterion parse_scan_criterion(std::string_view name) {
    if (name == "dip-recovery") return ScanCriterion::DipRecovery;
    if (name == "selective-fwd") return ScanCriterion::SelectiveFwd;
    if (name == "selective-rev") return ScanCriterion::SelectiveRev;
    throw InvalidArgument("unknown scan criterion '" + std::string(name) + "'");
}

std::string_view to_string(ScanCriterion c) {
    switch (c) {
        case ScanCriterion::DipRecovery: return "dip-recovery";
        case ScanCriterion::SelectiveFwd: return "selective-fwd";
        case ScanCriterion::SelectiveRev: return "selective-rev";
    }
    return "?";
}

ScanMetrics measure_run(const FuseState& initial, Volts amplitude, long pulses) {
    if (pulses < 0) throw InvalidArgument("pulse budget must be >= 0");
    ScanMetrics m;
    m.r_fuse_initial = fuse_read_resistance(initial);

    std::vector<Ohms> trace;
    trace.reserve(static_cast<std::size_t>(pulses));
    FuseState state = initial;
    Ohms prev_fwd = read_resistance(initial.fwd);
    Ohms prev_rev = read_resistance(initial.rev);
    Ohms min_r = m.r_fuse_initial;
    for (long k = 0; k < pulses; ++k) {
        auto [next, rec] = apply_fuse_pulse(state, amplitude, k);
        state = std::move(next);
        m.total_dr_fwd += std::abs(rec.r_fwd - prev_fwd);
        m.total_dr_rev += std::abs(rec.r_rev - prev_rev);
        prev_fwd = rec.r_fwd;
        prev_rev = rec.r_rev;
        if (rec.r_fuse < min_r) {
            min_r = rec.r_fuse;
            m.min_index = k;
        }
        trace.push_back(rec.r_fuse);
    }
    m.dip_depth = m.r_fuse_initial - min_r;
    const Ohms final_r = trace.empty() ? m.r_fuse_initial : trace.back();
    m.recovery = final_r - m.r_fuse_initial;
    m.rebound = final_r - min_r;
    if (m.dip_depth > 0.0) {
        const Ohms target = m.r_fuse_initial - 0.9 * m.dip_depth;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            if (trace[k] <= target) {
                m.dip90_index = static_cast<long>(k);
                break;
            }
        }
    }
    return m;
}

bool qualifies(const FuseState& initial, const ScanMetrics& m, ScanCriterion criterion, const ScanOptions& o) {
    switch (criterion) {
        case ScanCriterion::DipRecovery:
            return m.dip_depth > 0.0 && m.dip_depth > o.min_dip && m.rebound > 0.0 &&
                   m.recovery >= -o.recovery_tolerance * m.r_fuse_initial;
        case ScanCriterion::SelectiveFwd:
            return m.total_dr_rev < o.isolation_tolerance * initial.rev.bounds.span() &&
                   m.total_dr_fwd > o.selective_floor;
        case ScanCriterion::SelectiveRev:
            return m.total_dr_fwd < o.isolation_tolerance * initial.fwd.bounds.span() &&
                   m.total_dr_rev > o.selective_floor;
    }
    return false;
}

namespace {

void check_scan_inputs(const FuseState& initial, std::span<const Volts> amplitudes, long pulse_budget) {
    if (amplitudes.empty()) throw InvalidArgument("amplitude grid is empty");
    if (pulse_budget < 0) throw InvalidArgument("pulse budget must be >= 0");
    for (Volts a : amplitudes) {
        if (!std::isfinite(a)) throw InvalidArgument("amplitudes must be finite");
    }
    initial.validate();
}

ScanEntry scan_one(const FuseState& initial, Volts amplitude, long pulse_budget, ScanCriterion criterion,
                   const ScanOptions& options) {
    ScanEntry e;
    e.amplitude = amplitude;
    e.metrics = measure_run(initial, amplitude, pulse_budget);
    e.qualifies = qualifies(initial, e.metrics, criterion, options);
    return e;
}

}  // namespace

std::vector<ScanEntry> scan_amplitudes(const FuseState& initial, std::span<const Volts> amplitudes,
                                       long pulse_budget, ScanCriterion criterion, const ScanOptions& options) {
    check_scan_inputs(initial, amplitudes, pulse_budget);
    std::vector<ScanEntry> out(amplitudes.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(amplitudes.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = scan_one(initial, amplitudes[i], pulse_budget, criterion, options);
        } catch (...) {
#pragma omp critical(memfuse_scan_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<ScanEntry> reference::scan_amplitudes(const FuseState& initial, std::span<const Volts> amplitudes,
                                                  long pulse_budget, ScanCriterion criterion,
                                                  const ScanOptions& options) {
    check_scan_inputs(initial, amplitudes, pulse_budget);
    std::vector<ScanEntry> out;
    out.reserve(amplitudes.size());
    for (Volts a : amplitudes) out.push_back(scan_one(initial, a, pulse_budget, criterion, options));
    return out;
}

std::vector<Volts> amplitude_grid(Volts first, Volts last, Volts step) {
    if (!(step > 0.0) || !std::isfinite(first) || !std::isfinite(last)) {
        throw InvalidArgument("amplitude grid needs finite bounds and a positive step");
    }
    const double dir = last >= first ? 1.0 : -1.0;
    const auto n = static_cast<long>(std::floor(std::abs(last - first) / step + 0.5)) + 1;
    std::vector<Volts> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        // Round to 1e-12 V so grids built from decimal steps print cleanly.
        grid.push_back(std::round((first + dir * step * static_cast<double>(i)) * 1e12) / 1e12);
    }
    return grid;
}

}  // namespace memfuse
