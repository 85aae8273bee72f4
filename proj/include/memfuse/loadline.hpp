#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "memfuse/fuse.hpp"

namespace memfuse {

/// Per-device switching rates sampled over divider-voltage space at fixed bias.
struct LoadLine {
    Volts v_b = 0.0;
    SwitchingModel fwd_model;
    SwitchingModel rev_model;
    Connection connection = Connection::AntiSerial;
    std::vector<Volts> grid;        // v_x over [min(0,v_b), max(0,v_b)], endpoints included
    std::vector<Ohms> delta_fwd;    // switching_delta(fwd, v_x)
    std::vector<Ohms> delta_rev;    // switching_delta(rev, rev bias at v_x)

    [[nodiscard]] Ohms fwd_at(Volts v_x) const;
    [[nodiscard]] Ohms rev_at(Volts v_x) const;
};

[[nodiscard]] LoadLine build_load_line(const SwitchingModel& fwd, const SwitchingModel& rev, Volts v_b,
                                       int n_samples, Connection connection = Connection::AntiSerial);

struct Interval {
    Volts lo = 0.0;
    Volts hi = 0.0;
};

/// Default rate below which both devices count as inert (ohm per pulse).
inline constexpr Ohms kDefaultBottleneckEpsilon = 1.0;

struct Bottleneck {
    std::vector<Interval> intervals;  // disjoint, sorted
    [[nodiscard]] bool empty() const { return intervals.empty(); }
};

/// Maximal v_x intervals where both |rates| < epsilon. Interval edges are
/// refined by bisection between grid samples.
[[nodiscard]] Bottleneck find_bottleneck(const LoadLine& line, Ohms epsilon = kDefaultBottleneckEpsilon);

/// Change of v_x per pulse at the fuse's present state. Linear pair uses the
/// closed form; otherwise one pulse is applied and the divider re-solved.
[[nodiscard]] double drift(const FuseState& fuse, Volts v_b);

/// Linearised drift with resistances frozen at the fuse's state and the
/// device rates evaluated at a hypothetical divider voltage v_x.
[[nodiscard]] double drift_at(const FuseState& fuse, Volts v_b, Volts v_x);

enum class FixedPointKind { Attractor, Repeller, Marginal };
enum class FixedPointBasis { CurveCrossing, DriftZero };

struct FixedPoint {
    Volts v_x_star = 0.0;
    FixedPointKind kind = FixedPointKind::Marginal;
    FixedPointBasis basis = FixedPointBasis::DriftZero;
};

struct FixedPointReport {
    std::vector<FixedPoint> points;
    bool degenerate_bias = false;  // v_b == 0: every v_x is marginal
};

inline constexpr Volts kFixedPointTolerance = 1e-6;

[[nodiscard]] FixedPointReport find_fixed_points(const FuseState& fuse, Volts v_b, FixedPointBasis basis,
                                                 int scan_samples = 4001);

[[nodiscard]] std::string_view to_string(FixedPointKind kind);
[[nodiscard]] std::string_view to_string(FixedPointBasis basis);

// ---------------------------------------------------------------------------
// Amplitude scans
// ---------------------------------------------------------------------------

enum class ScanCriterion { DipRecovery, SelectiveFwd, SelectiveRev };

[[nodiscard]] ScanCriterion parse_scan_criterion(std::string_view name);
[[nodiscard]] std::string_view to_string(ScanCriterion c);

struct ScanOptions {
    double recovery_tolerance = 0.05;   // fraction of initial r_fuse
    double isolation_tolerance = 0.01;  // fraction of the inert device's range
    Ohms selective_floor = 100.0;       // active device must move more than this
    Ohms min_dip = 0.0;                 // dip depth must exceed this
};

struct ScanMetrics {
    Ohms r_fuse_initial = 0.0;
    Ohms dip_depth = 0.0;     // r_fuse(0) - min r_fuse, never negative
    Ohms recovery = 0.0;      // final - initial
    Ohms rebound = 0.0;       // final - min, rise after the dip
    Ohms total_dr_fwd = 0.0;  // total variation of r_fwd
    Ohms total_dr_rev = 0.0;
    long min_index = -1;      // pulse index of the minimum, -1 if no dip
    long dip90_index = -1;    // first pulse reaching 90% of the dip depth
};

struct ScanEntry {
    Volts amplitude = 0.0;
    ScanMetrics metrics;
    bool qualifies = false;

    friend bool operator==(const ScanEntry& a, const ScanEntry& b) {
        return a.amplitude == b.amplitude && a.qualifies == b.qualifies &&
               a.metrics.dip_depth == b.metrics.dip_depth && a.metrics.recovery == b.metrics.recovery &&
               a.metrics.rebound == b.metrics.rebound &&
               a.metrics.total_dr_fwd == b.metrics.total_dr_fwd &&
               a.metrics.total_dr_rev == b.metrics.total_dr_rev && a.metrics.min_index == b.metrics.min_index &&
               a.metrics.dip90_index == b.metrics.dip90_index;
    }
};

/// Metrics of one constant-amplitude run of `pulses` pulses.
[[nodiscard]] ScanMetrics measure_run(const FuseState& initial, Volts amplitude, long pulses);

[[nodiscard]] bool qualifies(const FuseState& initial, const ScanMetrics& m, ScanCriterion criterion,
                             const ScanOptions& options);

/// Simulates every amplitude from `initial` (OpenMP across the grid).
[[nodiscard]] std::vector<ScanEntry> scan_amplitudes(const FuseState& initial, std::span<const Volts> amplitudes,
                                                     long pulse_budget, ScanCriterion criterion,
                                                     const ScanOptions& options = {});

/// Evenly spaced grid from `first` to `last` inclusive (within half a step).
[[nodiscard]] std::vector<Volts> amplitude_grid(Volts first, Volts last, Volts step);

namespace reference {

/// Single-threaded scan kept as the oracle for the parallel kernel.
[[nodiscard]] std::vector<ScanEntry> scan_amplitudes(const FuseState& initial, std::span<const Volts> amplitudes,
                                                     long pulse_budget, ScanCriterion criterion,
                                                     const ScanOptions& options = {});

}  // namespace reference

}  // namespace memfuse
