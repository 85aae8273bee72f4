#include "memfuse/fuse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memfuse/roots.hpp"

namespace memfuse {

void FuseState::validate() const {
    fwd.validate();
    rev.validate();
}

FuseState preset_fuse() { return {preset_state("M2"), preset_state("M1"), Connection::AntiSerial}; }

FuseState exchanged(const FuseState& fuse) { return {fuse.rev, fuse.fwd, fuse.connection}; }

void PulseTrain::validate() const {
    if (!std::isfinite(amplitude)) throw InvalidArgument("pulse amplitude must be finite");
    if (count < 0) throw InvalidArgument("pulse count must be >= 0");
}

Volts rev_device_bias(Connection c, Volts v_b, Volts v_x) {
    const Volts across = v_b - v_x;
    return c == Connection::AntiSerial ? -across : across;
}

namespace {

/// Series current through the rev device in the terminal frame.
Amperes rev_series_current(const FuseState& fuse, Volts v_b, Volts v_x) {
    const Amperes own = device_current(fuse.rev.iv, fuse.rev.r, rev_device_bias(fuse.connection, v_b, v_x));
    return fuse.connection == Connection::AntiSerial ? -own : own;
}

bool linear_pair(const FuseState& fuse) { return is_linear(fuse.fwd.iv) && is_linear(fuse.rev.iv); }

}  // namespace

DividerSolution solve_divider_bracketed(const FuseState& fuse, Volts v_b) {
    if (!std::isfinite(v_b)) throw InvalidArgument("bias voltage must be finite");
    if (v_b == 0.0) return {};

    // Both branch currents increase with v_x in the terminal frame, so the
    // mismatch is monotone and [min(0,v_b), max(0,v_b)] brackets the root.
    auto mismatch = [&](Volts v_x) {
        return device_current(fuse.fwd.iv, fuse.fwd.r, v_x) - rev_series_current(fuse, v_b, v_x);
    };
    const auto res = roots::bisect(mismatch, std::min(0.0, v_b), std::max(0.0, v_b),
                                   kDividerResidualTarget, 0.0, 2000);
    if (!(std::abs(res.residual) < kDividerResidualTarget)) {
        std::ostringstream msg;
        msg << "divider solver did not converge at v_b=" << v_b << " (residual " << res.residual << " A)";
        throw ConvergenceError(msg.str(), res.residual);
    }
    return {res.x, device_current(fuse.fwd.iv, fuse.fwd.r, res.x), res.residual, res.iterations};
}

DividerSolution solve_divider_detailed(const FuseState& fuse, Volts v_b) {
    if (!std::isfinite(v_b)) throw InvalidArgument("bias voltage must be finite");
    if (linear_pair(fuse)) {
        const Ohms total = fuse.fwd.r + fuse.rev.r;
        return {v_b * fuse.fwd.r / total, v_b / total, 0.0, 0};
    }
    return solve_divider_bracketed(fuse, v_b);
}

Volts solve_divider(const FuseState& fuse, Volts v_b) { return solve_divider_detailed(fuse, v_b).v_x; }

Ohms fuse_read_resistance(const FuseState& fuse, Volts v_read) {
    if (v_read == 0.0 || !std::isfinite(v_read)) {
        throw InvalidArgument("read voltage must be finite and nonzero");
    }
    if (linear_pair(fuse)) return fuse.fwd.r + fuse.rev.r;
    return v_read / solve_divider_detailed(fuse, v_read).current;
}

std::pair<FuseState, StepRecord> apply_fuse_pulse(const FuseState& fuse, Volts v_b, long pulse_index) {
    const Volts v_x = solve_divider(fuse, v_b);
    FuseState next = fuse;
    next.fwd = apply_pulse(fuse.fwd, v_x);
    next.rev = apply_pulse(fuse.rev, rev_device_bias(fuse.connection, v_b, v_x));

    StepRecord rec;
    rec.pulse_index = pulse_index;
    rec.v_b = v_b;
    rec.v_x = v_x;
    rec.r_fwd = read_resistance(next.fwd);
    rec.r_rev = read_resistance(next.rev);
    rec.r_fuse = fuse_read_resistance(next);
    return {std::move(next), rec};
}

std::pair<FuseState, Trajectory> run_pulse_train(const FuseState& fuse, std::span<const PulseTrain> trains) {
    long total = 0;
    for (const auto& t : trains) {
        t.validate();
        total += t.count;
    }
    Trajectory traj;
    traj.initial = fuse;
    traj.trains.assign(trains.begin(), trains.end());
    traj.records.reserve(static_cast<std::size_t>(total));

    FuseState state = fuse;
    long index = 0;
    for (const auto& t : trains) {
        for (long k = 0; k < t.count; ++k) {
            auto [next, rec] = apply_fuse_pulse(state, t.amplitude, index++);
            state = std::move(next);
            traj.records.push_back(rec);
        }
    }
    return {std::move(state), std::move(traj)};
}

FuseState saturate(const FuseState& fuse, int polarity) {
    if (polarity == 0) throw InvalidArgument("saturation polarity must be nonzero");
    FuseState out = fuse;
    const bool positive = polarity > 0;
    out.fwd.r = positive ? fuse.fwd.bounds.r_ceiling : fuse.fwd.bounds.r_floor;
    if (fuse.connection == Connection::AntiSerial) {
        out.rev.r = positive ? fuse.rev.bounds.r_floor : fuse.rev.bounds.r_ceiling;
    } else {
        out.rev.r = positive ? fuse.rev.bounds.r_ceiling : fuse.rev.bounds.r_floor;
    }
    return out;
}

}  // namespace memfuse
