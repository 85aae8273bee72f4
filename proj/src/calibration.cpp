#include "memfuse/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "memfuse/roots.hpp"

namespace memfuse {

std::vector<SensitivitySample> run_characterization(const MemristorState& device, std::span<const Volts> ramp,
                                                    long pulses_per_train) {
    if (pulses_per_train < 1) throw InvalidArgument("pulses_per_train must be >= 1");
    device.validate();
    MemristorState dut = device;
    std::vector<SensitivitySample> out;
    out.reserve(ramp.size());
    for (Volts v : ramp) {
        const Ohms before = read_resistance(dut);
        for (long k = 0; k < pulses_per_train; ++k) dut = apply_pulse(dut, v);
        const Ohms after = read_resistance(dut);
        out.push_back({v, (after - before) / static_cast<double>(pulses_per_train), 1.0});
    }
    return out;
}

SwitchingParams FitResult::params() const {
    if (!complete()) {
        throw FitError(forward ? "reverse polarity could not be fitted" : "forward polarity could not be fitted");
    }
    return {forward->scale, reverse->scale, forward->threshold, reverse->threshold};
}

double model_rss(const SwitchingParams& params, std::span<const SensitivitySample> data) {
    double rss = 0.0;
    for (const auto& s : data) {
        const double e = s.delta_r - switching_delta(params, s.v);
        rss += s.weight * e * e;
    }
    return rss;
}

namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// Samples of one polarity, stored with |v| so both sides share one code path.
struct Side {
    std::vector<double> mag;  // |v|
    std::vector<double> y;    // delta_r, sign-flipped for the reverse side
    std::vector<double> w;
    double max_mag = 0.0;
};

struct Candidate {
    double rss = kInfeasible;
    double scale = 0.0;  // in flipped units: > 0 when admissible
};

/// Cost of threshold t (in |v| units): closed-form scale over samples beyond
/// t, zero model inside the dead zone.
Candidate side_cost(const Side& s, double t) {
    double sxy = 0.0, sxx = 0.0, dead = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < s.mag.size(); ++i) {
        if (s.mag[i] > t) {
            const double x = (s.mag[i] - t) * (s.mag[i] - t);
            sxy += s.w[i] * s.y[i] * x;
            sxx += s.w[i] * x * x;
            ++active;
        } else {
            dead += s.w[i] * s.y[i] * s.y[i];
        }
    }
    if (active < 2 || !(sxx > 0.0)) return {};
    const double a = sxy / sxx;
    if (!(a > 0.0)) return {};
    double rss = dead;
    for (std::size_t i = 0; i < s.mag.size(); ++i) {
        if (s.mag[i] > t) {
            const double x = (s.mag[i] - t) * (s.mag[i] - t);
            const double e = s.y[i] - a * x;
            rss += s.w[i] * e * e;
        }
    }
    return {rss, a};
}

template <bool Parallel>
std::optional<PolarityFit> fit_side(const Side& s, const FitOptions& opt) {
    if (s.mag.size() < 2) return std::nullopt;
    const auto n_grid = static_cast<std::ptrdiff_t>(std::floor(s.max_mag / opt.grid_step + 1e-9)) + 1;
    std::vector<Candidate> grid(static_cast<std::size_t>(n_grid));

    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n_grid; ++k) grid[k] = side_cost(s, opt.grid_step * static_cast<double>(k));
    } else {
        for (std::ptrdiff_t k = 0; k < n_grid; ++k) grid[k] = side_cost(s, opt.grid_step * static_cast<double>(k));
    }

    // Strict '<' in increasing |t| breaks ties toward the smaller threshold.
    std::ptrdiff_t best = -1;
    for (std::ptrdiff_t k = 0; k < n_grid; ++k) {
        if (grid[k].rss < kInfeasible && (best < 0 || grid[k].rss < grid[best].rss)) best = k;
    }
    if (best < 0) return std::nullopt;

    double t_best = opt.grid_step * static_cast<double>(best);
    Candidate c_best = grid[best];
    const double lo = std::max(0.0, t_best - opt.grid_step);
    const double hi = std::min(s.max_mag, t_best + opt.grid_step);
    if (hi > lo) {
        const double t_ref = roots::golden_section_min([&](double t) { return side_cost(s, t).rss; }, lo, hi,
                                                       opt.refine_tolerance);
        const Candidate c_ref = side_cost(s, t_ref);
        if (c_ref.rss < c_best.rss) {
            t_best = t_ref;
            c_best = c_ref;
        }
    }
    return PolarityFit{t_best, c_best.scale, c_best.rss, s.mag.size()};
}

template <bool Parallel>
FitResult fit_impl(std::span<const SensitivitySample> data, const FitOptions& opt) {
    if (!(opt.grid_step > 0.0)) throw InvalidArgument("grid step must be > 0");
    if (data.empty()) throw FitError("no samples to fit");
    Side fwd, rev;
    double zero_bias_rss = 0.0;
    for (const auto& s : data) {
        if (!std::isfinite(s.v) || !std::isfinite(s.delta_r) || !std::isfinite(s.weight)) {
            throw InvalidArgument("sensitivity samples must be finite");
        }
        if (s.weight < 0.0) throw InvalidArgument("sample weights must be >= 0");
        if (s.v > 0.0) {
            fwd.mag.push_back(s.v);
            fwd.y.push_back(s.delta_r);
            fwd.w.push_back(s.weight);
            fwd.max_mag = std::max(fwd.max_mag, s.v);
        } else if (s.v < 0.0) {
            rev.mag.push_back(-s.v);
            rev.y.push_back(-s.delta_r);
            rev.w.push_back(s.weight);
            rev.max_mag = std::max(rev.max_mag, -s.v);
        } else {
            zero_bias_rss += s.weight * s.delta_r * s.delta_r;
        }
    }

    FitResult result;
    result.n_samples = data.size();
    result.forward = fit_side<Parallel>(fwd, opt);
    result.reverse = fit_side<Parallel>(rev, opt);
    if (!result.forward && !result.reverse) throw FitError("no threshold identifiable in either polarity");

    if (result.reverse) {
        result.reverse->threshold = -result.reverse->threshold;
        result.reverse->scale = -result.reverse->scale;
    }

    auto unmodelled = [](const Side& s) {
        double r = 0.0;
        for (std::size_t i = 0; i < s.y.size(); ++i) r += s.w[i] * s.y[i] * s.y[i];
        return r;
    };
    result.rss = zero_bias_rss + (result.forward ? result.forward->rss : unmodelled(fwd)) +
                 (result.reverse ? result.reverse->rss : unmodelled(rev));
    return result;
}

}  // namespace

FitResult fit_switching_params(std::span<const SensitivitySample> data, const FitOptions& options) {
    return fit_impl<true>(data, options);
}

FitResult reference::fit_switching_params(std::span<const SensitivitySample> data, const FitOptions& options) {
    return fit_impl<false>(data, options);
}

std::vector<SensitivitySample> synthetic_samples(const SwitchingParams& params, std::span<const Volts> voltages,
                                                 Ohms noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-noise, noise);
    std::vector<SensitivitySample> out;
    out.reserve(voltages.size());
    for (Volts v : voltages) {
        const double n = noise > 0.0 ? jitter(rng) : 0.0;
        out.push_back({v, switching_delta(params, v) + n, 1.0});
    }
    return out;
}

bool fit_within(const FitResult& fit, const SwitchingParams& truth, const MonteCarloTolerance& tol) {
    if (!fit.complete()) return false;
    const SwitchingParams p = fit.params();
    return std::abs(p.v_th_plus - truth.v_th_plus) <= tol.threshold &&
           std::abs(p.v_th_minus - truth.v_th_minus) <= tol.threshold &&
           std::abs(p.a_plus / truth.a_plus - 1.0) <= tol.relative_scale &&
           std::abs(p.a_minus / truth.a_minus - 1.0) <= tol.relative_scale;
}

MonteCarloFitSummary monte_carlo_fit(const SwitchingParams& truth, std::span<const Volts> voltages, Ohms noise,
                                     int runs, std::uint64_t first_seed, const MonteCarloTolerance& tol) {
    if (runs < 0) throw InvalidArgument("runs must be >= 0");
    MonteCarloFitSummary summary;
    summary.runs = runs;
    summary.fits.resize(static_cast<std::size_t>(runs));
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < runs; ++i) {
        try {
            const auto data = synthetic_samples(truth, voltages, noise, first_seed + static_cast<std::uint64_t>(i));
            summary.fits[i] = reference::fit_switching_params(data);
        } catch (...) {
#pragma omp critical(memfuse_mc_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& f : summary.fits) summary.within_tolerance += fit_within(f, truth, tol) ? 1 : 0;
    return summary;
}

}  // namespace memfuse
