#include "memfuse/device.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memfuse {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

double cubic_coefficient(const IVModel& iv, Volts v) {
    return std::visit(
        [v](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearIV>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, OddPolynomialIV>) {
                return m.c3;
            } else {
                return v >= 0.0 ? m.c3_fwd : m.c3_rev;
            }
        },
        iv);
}

}  // namespace

void SwitchingParams::validate() const {
    require_finite(a_plus, "a_plus");
    require_finite(a_minus, "a_minus");
    require_finite(v_th_plus, "v_th_plus");
    require_finite(v_th_minus, "v_th_minus");
    if (!(a_plus > 0.0)) throw InvalidArgument("a_plus must be > 0");
    if (!(a_minus < 0.0)) throw InvalidArgument("a_minus must be < 0");
    if (!(v_th_plus > 0.0)) throw InvalidArgument("v_th_plus must be > 0");
    if (!(v_th_minus < 0.0)) throw InvalidArgument("v_th_minus must be < 0");
}

void StateBounds::validate() const {
    require_finite(r_floor, "r_floor");
    require_finite(r_ceiling, "r_ceiling");
    if (!(r_floor > 0.0 && r_floor < r_ceiling)) {
        throw InvalidArgument("bounds require 0 < r_floor < r_ceiling");
    }
}

Ohms StateBounds::clamp(Ohms r) const { return std::clamp(r, r_floor, r_ceiling); }

void validate_iv(const IVModel& iv) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OddPolynomialIV>) {
                require_finite(m.c3, "c3");
            } else if constexpr (std::is_same_v<T, AsymmetricIV>) {
                require_finite(m.c3_fwd, "c3_fwd");
                require_finite(m.c3_rev, "c3_rev");
            }
        },
        iv);
    // Monotonicity is sampled rather than derived so new IV variants stay covered.
    constexpr int kSamples = 1001;
    for (int i = 0; i < kSamples; ++i) {
        const Volts v = -kOperatingVoltage + 2.0 * kOperatingVoltage * i / (kSamples - 1);
        if (!(device_conductance(iv, 1.0, v) > 0.0)) {
            std::ostringstream msg;
            msg << "I-V model is not strictly increasing at V=" << v;
            throw InvalidArgument(msg.str());
        }
    }
}

bool is_linear(const IVModel& iv) { return std::holds_alternative<LinearIV>(iv); }

double window_multiplier(const WindowFunction& window, const StateBounds& bounds, Ohms r,
                         double direction) {
    if (std::holds_alternative<NoWindow>(window) || direction == 0.0) return 1.0;
    const double span = bounds.span();
    const double m = direction > 0.0 ? (bounds.r_ceiling - r) / span : (r - bounds.r_floor) / span;
    return std::clamp(m, 0.0, 1.0);
}

void MemristorState::validate() const {
    bounds.validate();
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SwitchingParams>) {
                s.validate();
            } else {
                require_finite(s.a, "cubic coefficient");
            }
        },
        switching);
    validate_iv(iv);
    require_finite(r, "r");
    if (r < bounds.r_floor || r > bounds.r_ceiling) {
        throw InvalidArgument("resistive state outside bounds");
    }
}

Ohms switching_delta(const SwitchingParams& p, Volts v_b) {
    require_finite(v_b, "bias voltage");
    if (v_b > p.v_th_plus) {
        const double d = v_b - p.v_th_plus;
        return p.a_plus * d * d;
    }
    if (v_b < p.v_th_minus) {
        const double d = v_b - p.v_th_minus;
        return p.a_minus * d * d;
    }
    return 0.0;
}

Ohms switching_delta(const SwitchingModel& model, Volts v_b) {
    return std::visit(
        [v_b](const auto& m) -> Ohms {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SwitchingParams>) {
                return switching_delta(m, v_b);
            } else {
                require_finite(v_b, "bias voltage");
                return m.a * v_b * v_b * v_b;
            }
        },
        model);
}

Ohms effective_delta(const MemristorState& state, Volts v_b) {
    const Ohms raw = switching_delta(state.switching, v_b);
    if (raw == 0.0) return 0.0;
    return raw * window_multiplier(state.window, state.bounds, state.r, raw);
}

Amperes device_current(const IVModel& iv, Ohms r, Volts v) {
    if (!(r > 0.0)) throw InvalidArgument("resistance must be > 0");
    const double c3 = cubic_coefficient(iv, v);
    return (v + c3 * v * v * v) / r;
}

double device_conductance(const IVModel& iv, Ohms r, Volts v) {
    if (!(r > 0.0)) throw InvalidArgument("resistance must be > 0");
    const double c3 = cubic_coefficient(iv, v);
    return (1.0 + 3.0 * c3 * v * v) / r;
}

MemristorState apply_pulse(const MemristorState& state, Volts v_b) {
    MemristorState next = state;
    next.r = state.bounds.clamp(state.r + effective_delta(state, v_b));
    return next;
}

Ohms read_resistance(const MemristorState& state, Volts v_read) {
    if (v_read == 0.0 || !std::isfinite(v_read)) {
        throw InvalidArgument("read voltage must be finite and nonzero");
    }
    if (is_linear(state.iv)) return state.r;
    return v_read / device_current(state.iv, state.r, v_read);
}

DevicePreset preset(std::string_view name) {
    if (name == "M1") {
        return {"M1", {235.2, -91.8, 1.07, -0.52}, {3000.0, 3600.0}, 3300.0};
    }
    if (name == "M2") {
        return {"M2", {439.4, -298.2, 0.71, -0.45}, {4100.0, 4900.0}, 4500.0};
    }
    throw InvalidArgument("unknown device preset '" + std::string(name) + "'");
}

MemristorState preset_state(std::string_view name) {
    const DevicePreset p = preset(name);
    MemristorState s;
    s.r = p.base_resistance;
    s.bounds = p.bounds;
    s.switching = p.params;
    return s;
}

}  // namespace memfuse
