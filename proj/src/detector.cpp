#include "memfuse/detector.hpp"

#include <algorithm>
#include <cmath>

namespace memfuse {

void DetectorConfig::validate() const {
    if (!(rel_drop_threshold > 0.0 && rel_drop_threshold < 1.0)) {
        throw InvalidArgument("rel_drop_threshold must lie in (0, 1)");
    }
    if (arm_after < 0) throw InvalidArgument("arm_after must be >= 0");
    if (refractory < 0) throw InvalidArgument("refractory must be >= 0");
}

StepDetector::StepDetector(DetectorConfig config, Ohms initial_r_fuse) : config_(config) {
    config_.validate();
    if (config_.arm_after == 0) {
        armed_ = true;
        running_max_ = initial_r_fuse;
    }
}

std::optional<DetectionEvent> StepDetector::observe(long pulse_index, Volts amplitude, Ohms r_fuse) {
    const int sign = amplitude > 0.0 ? 1 : (amplitude < 0.0 ? -1 : 0);
    if (sign != 0 && sign == streak_sign_) {
        ++streak_;
    } else {
        streak_sign_ = sign;
        streak_ = sign != 0 ? 1 : 0;
    }

    if (!armed_) {
        if (streak_ >= config_.arm_after) {
            armed_ = true;
            running_max_ = r_fuse;
        }
        return std::nullopt;
    }

    if (last_detection_ >= 0 && pulse_index - last_detection_ <= config_.refractory) {
        running_max_ = r_fuse;
        return std::nullopt;
    }
    if (r_fuse < (1.0 - config_.rel_drop_threshold) * running_max_) {
        DetectionEvent ev{pulse_index, r_fuse, running_max_};
        last_detection_ = pulse_index;
        running_max_ = r_fuse;
        return ev;
    }
    running_max_ = std::max(running_max_, r_fuse);
    return std::nullopt;
}

DetectorRun run_detector(const FuseState& fuse, std::span<const Volts> events, const DetectorConfig& config) {
    fuse.validate();
    DetectorRun run;
    run.trajectory.initial = fuse;
    run.trajectory.records.reserve(events.size());

    StepDetector detector(config, fuse_read_resistance(fuse));
    FuseState state = fuse;
    long index = 0;
    for (Volts a : events) {
        if (!std::isfinite(a)) throw InvalidArgument("event amplitudes must be finite");
        auto [next, rec] = apply_fuse_pulse(state, a, index);
        state = std::move(next);
        run.trajectory.records.push_back(rec);

        // Consecutive equal amplitudes collapse into one train descriptor.
        auto& trains = run.trajectory.trains;
        if (!trains.empty() && trains.back().amplitude == a) {
            ++trains.back().count;
        } else {
            trains.push_back({a, 1});
        }

        if (auto ev = detector.observe(index, a, rec.r_fuse)) run.events.push_back(*ev);
        ++index;
    }
    run.final_state = std::move(state);
    return run;
}

}  // namespace memfuse
