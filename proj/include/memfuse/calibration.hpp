#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memfuse/device.hpp"

namespace memfuse {

/// One point of a voltage-sensitivity (switching) plot.
struct SensitivitySample {
    Volts v = 0.0;
    Ohms delta_r = 0.0;  // per pulse
    double weight = 1.0;

    friend bool operator==(const SensitivitySample&, const SensitivitySample&) = default;
};

/// Pulse-ramp characterisation: for each amplitude, apply a train to the
/// (persisting) device and record the read-out change per pulse.
[[nodiscard]] std::vector<SensitivitySample> run_characterization(const MemristorState& device,
                                                                  std::span<const Volts> ramp,
                                                                  long pulses_per_train);

/// Fitted threshold and scale for one polarity.
struct PolarityFit {
    Volts threshold = 0.0;
    double scale = 0.0;
    double rss = 0.0;  // residual over this polarity's samples
    std::size_t n_samples = 0;
};

struct FitOptions {
    Volts grid_step = 0.01;
    double refine_tolerance = 1e-12;
};

struct FitResult {
    std::optional<PolarityFit> forward;  // v > 0 side
    std::optional<PolarityFit> reverse;  // v < 0 side
    double rss = 0.0;                    // over all samples (missing side counted as zero model)
    std::size_t n_samples = 0;

    [[nodiscard]] bool complete() const { return forward.has_value() && reverse.has_value(); }

    /// Throws FitError unless both polarities were identified.
    [[nodiscard]] SwitchingParams params() const;
};

/// Grid search over thresholds refined by golden section; scales in closed
/// form by weighted least squares. A polarity with no admissible fit is
/// left empty; if neither side can be fitted FitError is thrown.
[[nodiscard]] FitResult fit_switching_params(std::span<const SensitivitySample> data, const FitOptions& options = {});

/// Weighted residual sum of squares of `params` on `data`.
[[nodiscard]] double model_rss(const SwitchingParams& params, std::span<const SensitivitySample> data);

/// Samples of the switching function itself, optionally with uniform noise
/// of half-width `noise` drawn from a generator seeded with `seed`.
[[nodiscard]] std::vector<SensitivitySample> synthetic_samples(const SwitchingParams& params,
                                                               std::span<const Volts> voltages, Ohms noise = 0.0,
                                                               std::uint64_t seed = 0);

struct MonteCarloFitSummary {
    int runs = 0;
    int within_tolerance = 0;
    std::vector<FitResult> fits;  // one per seed, in seed order
};

struct MonteCarloTolerance {
    Volts threshold = 0.05;
    double relative_scale = 0.05;
};

/// Noisy round-trip fits for seeds first_seed .. first_seed+runs-1 (OpenMP across seeds).
[[nodiscard]] MonteCarloFitSummary monte_carlo_fit(const SwitchingParams& truth, std::span<const Volts> voltages,
                                                   Ohms noise, int runs, std::uint64_t first_seed = 0,
                                                   const MonteCarloTolerance& tol = {});

[[nodiscard]] bool fit_within(const FitResult& fit, const SwitchingParams& truth, const MonteCarloTolerance& tol);

namespace reference {

[[nodiscard]] FitResult fit_switching_params(std::span<const SensitivitySample> data, const FitOptions& options = {});

}  // namespace reference

}  // namespace memfuse
