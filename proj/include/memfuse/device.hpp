#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "memfuse/errors.hpp"
#include "memfuse/units.hpp"

namespace memfuse {

/// Empirical four-parameter switching function of a single memristor.
///
/// Resistance change per pulse at bias v:
///   a_plus  * (v - v_th_plus)^2   for v > v_th_plus
///   0                             inside the dead zone
///   a_minus * (v - v_th_minus)^2  for v < v_th_minus
/// Forward bias raises resistance (reset), reverse bias lowers it (set).
struct SwitchingParams {
    double a_plus = 0.0;   // ohm / V^2, > 0
    double a_minus = 0.0;  // ohm / V^2, < 0
    Volts v_th_plus = 0.0;
    Volts v_th_minus = 0.0;

    /// Throws InvalidArgument unless signs and thresholds are consistent.
    void validate() const;

    friend bool operator==(const SwitchingParams&, const SwitchingParams&) = default;
};

/// Synthetic odd-cubic sensitivity, dR = a * v^3. Used for attractor studies.
struct OddCubicSwitching {
    double a = 0.0;  // ohm / V^3

    friend bool operator==(const OddCubicSwitching&, const OddCubicSwitching&) = default;
};

using SwitchingModel = std::variant<SwitchingParams, OddCubicSwitching>;

struct StateBounds {
    Ohms r_floor = 0.0;
    Ohms r_ceiling = 0.0;

    void validate() const;
    [[nodiscard]] Ohms span() const { return r_ceiling - r_floor; }
    [[nodiscard]] Ohms clamp(Ohms r) const;

    friend bool operator==(const StateBounds&, const StateBounds&) = default;
};

// ---------------------------------------------------------------------------
// I-V models. Current is I = V/R plus an optional cubic term scaled by 1/R.
// ---------------------------------------------------------------------------

struct LinearIV {
    friend bool operator==(const LinearIV&, const LinearIV&) = default;
};

struct OddPolynomialIV {
    double c3 = 0.0;  // 1/V^2
    friend bool operator==(const OddPolynomialIV&, const OddPolynomialIV&) = default;
};

struct AsymmetricIV {
    double c3_fwd = 0.0;  // used for v >= 0
    double c3_rev = 0.0;  // used for v < 0
    friend bool operator==(const AsymmetricIV&, const AsymmetricIV&) = default;
};

using IVModel = std::variant<LinearIV, OddPolynomialIV, AsymmetricIV>;

/// Voltage range over which an I-V model must be strictly increasing.
inline constexpr Volts kOperatingVoltage = 5.0;

/// Throws InvalidArgument if dI/dV is not positive on |V| <= kOperatingVoltage.
void validate_iv(const IVModel& iv);

[[nodiscard]] bool is_linear(const IVModel& iv);

// ---------------------------------------------------------------------------
// Window functions (state-dependent switchability).
// ---------------------------------------------------------------------------

struct NoWindow {
    friend bool operator==(const NoWindow&, const NoWindow&) = default;
};

/// Multiplier falls linearly to zero at the bound being approached.
struct LinearBoundaryWindow {
    friend bool operator==(const LinearBoundaryWindow&, const LinearBoundaryWindow&) = default;
};

using WindowFunction = std::variant<NoWindow, LinearBoundaryWindow>;

/// Window multiplier in [0, 1] for a change of sign `direction` at state r.
[[nodiscard]] double window_multiplier(const WindowFunction& window, const StateBounds& bounds,
                                       Ohms r, double direction);

// ---------------------------------------------------------------------------

struct MemristorState {
    Ohms r = 0.0;
    StateBounds bounds;
    SwitchingModel switching = SwitchingParams{};
    IVModel iv = LinearIV{};
    WindowFunction window = NoWindow{};

    /// Validates every component and that r lies within bounds.
    void validate() const;

    friend bool operator==(const MemristorState&, const MemristorState&) = default;
};

/// Standard read-out bias.
inline constexpr Volts kReadVoltage = 0.2;

/// Nominal pulse width carried as metadata; the model is per pulse.
inline constexpr double kPulseWidthSeconds = 100e-6;

[[nodiscard]] Ohms switching_delta(const SwitchingParams& params, Volts v_b);
[[nodiscard]] Ohms switching_delta(const SwitchingModel& model, Volts v_b);

/// Switching delta scaled by the state's window multiplier.
[[nodiscard]] Ohms effective_delta(const MemristorState& state, Volts v_b);

[[nodiscard]] Amperes device_current(const IVModel& iv, Ohms r, Volts v);

/// dI/dV of the model at v.
[[nodiscard]] double device_conductance(const IVModel& iv, Ohms r, Volts v);

/// One pulse at v_b: r' = clamp(r + effective_delta). Pure.
[[nodiscard]] MemristorState apply_pulse(const MemristorState& state, Volts v_b);

/// Static resistance at v_read.
[[nodiscard]] Ohms read_resistance(const MemristorState& state, Volts v_read = kReadVoltage);

// ---------------------------------------------------------------------------
// Measured device presets.
// ---------------------------------------------------------------------------

struct DevicePreset {
    std::string name;
    SwitchingParams params;
    StateBounds bounds;
    Ohms base_resistance = 0.0;
};

/// "M1" or "M2"; throws InvalidArgument otherwise.
[[nodiscard]] DevicePreset preset(std::string_view name);

/// Preset device at its base resistance with Linear IV and no window.
[[nodiscard]] MemristorState preset_state(std::string_view name);

}  // namespace memfuse
