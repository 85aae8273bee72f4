#pragma once

#include <span>
#include <utility>
#include <vector>

#include "memfuse/device.hpp"

namespace memfuse {

/// How the second device is mounted relative to the first.
///
/// AntiSerial is the memristive fuse: the rev device sees -(v_b - v_x) in its
/// own frame. Series mounts both devices the same way round (rev sees
/// +(v_b - v_x)); it exists for synthetic symmetric-pair studies.
enum class Connection { AntiSerial, Series };

/// Ordered two-device fuse. v_x is always the voltage across `fwd`.
struct FuseState {
    MemristorState fwd;  // M2 in the reference setup
    MemristorState rev;  // M1 in the reference setup
    Connection connection = Connection::AntiSerial;

    void validate() const;

    friend bool operator==(const FuseState&, const FuseState&) = default;
};

/// The reference fuse: fwd = M2, rev = M1, both at base state.
[[nodiscard]] FuseState preset_fuse();

/// Same devices with fwd and rev swapped (v_x maps to v_b - v_x).
[[nodiscard]] FuseState exchanged(const FuseState& fuse);

struct PulseTrain {
    Volts amplitude = 0.0;
    long count = 0;
    double width = kPulseWidthSeconds;

    void validate() const;

    friend bool operator==(const PulseTrain&, const PulseTrain&) = default;
};

struct StepRecord {
    long pulse_index = 0;
    Volts v_b = 0.0;
    Volts v_x = 0.0;  // divider voltage seen during the pulse (pre-pulse state)
    Ohms r_fwd = 0.0;
    Ohms r_rev = 0.0;
    Ohms r_fuse = 0.0;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trajectory {
    FuseState initial;
    std::vector<PulseTrain> trains;
    std::vector<StepRecord> records;
};

/// Bias seen by the rev device in its own frame.
[[nodiscard]] Volts rev_device_bias(Connection c, Volts v_b, Volts v_x);

/// Divider solver output.
struct DividerSolution {
    Volts v_x = 0.0;
    Amperes current = 0.0;   // series current, terminal frame
    Amperes residual = 0.0;  // I_fwd - I_series_rev
    int iterations = 0;
};

inline constexpr Amperes kDividerResidualTarget = 1e-12;

/// Voltage across the fwd device at fuse bias v_b. Closed form when both IV
/// models are linear, bracketed bisection otherwise.
[[nodiscard]] Volts solve_divider(const FuseState& fuse, Volts v_b);
[[nodiscard]] DividerSolution solve_divider_detailed(const FuseState& fuse, Volts v_b);

/// Always uses the bracketing solver, whatever the IV models.
/// Throws ConvergenceError when the residual target is not met.
[[nodiscard]] DividerSolution solve_divider_bracketed(const FuseState& fuse, Volts v_b);

/// One synchronous pulse: both deltas from the pre-pulse state, then clamp.
[[nodiscard]] std::pair<FuseState, StepRecord> apply_fuse_pulse(const FuseState& fuse, Volts v_b,
                                                               long pulse_index = 0);

[[nodiscard]] std::pair<FuseState, Trajectory> run_pulse_train(const FuseState& fuse,
                                                             std::span<const PulseTrain> trains);

/// Whole-fuse static resistance at v_read. Linear pair gives r_fwd + r_rev exactly.
[[nodiscard]] Ohms fuse_read_resistance(const FuseState& fuse, Volts v_read = kReadVoltage);

/// End state of a long train of the given polarity (sign of `polarity`).
[[nodiscard]] FuseState saturate(const FuseState& fuse, int polarity);

}  // namespace memfuse
