#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "memfuse/fuse.hpp"

namespace memfuse {

struct DetectorConfig {
    double rel_drop_threshold = 0.03;  // fraction of the running maximum
    long arm_after = 10;               // consecutive same-polarity events before arming
    long refractory = 50;              // pulses after a detection with no new detection

    void validate() const;
};

struct DetectionEvent {
    long pulse_index = 0;
    Ohms r_fuse_at_detection = 0.0;
    Ohms running_max = 0.0;

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Streaming detector state machine. A plain value: copy it to checkpoint.
///
/// Arms after `arm_after` consecutive events of one polarity and stays armed.
/// While armed it tracks the running maximum of r_fuse and fires when the
/// fuse drops below (1 - threshold) of it. For `refractory` pulses after a
/// detection the running maximum follows r_fuse and nothing fires.
class StepDetector {
public:
    explicit StepDetector(DetectorConfig config = {}, Ohms initial_r_fuse = 0.0);

    /// Feed one processed pulse; returns a detection if one fired.
    std::optional<DetectionEvent> observe(long pulse_index, Volts amplitude, Ohms r_fuse);

    [[nodiscard]] bool armed() const { return armed_; }
    [[nodiscard]] Ohms running_max() const { return running_max_; }
    [[nodiscard]] const DetectorConfig& config() const { return config_; }

private:
    DetectorConfig config_;
    bool armed_ = false;
    int streak_sign_ = 0;
    long streak_ = 0;
    Ohms running_max_ = 0.0;
    long last_detection_ = -1;
};

struct DetectorRun {
    FuseState final_state;
    Trajectory trajectory;
    std::vector<DetectionEvent> events;
};

/// Drives the fuse with one pulse per event amplitude and runs the detector.
[[nodiscard]] DetectorRun run_detector(const FuseState& fuse, std::span<const Volts> events,
                                       const DetectorConfig& config = {});

}  // namespace memfuse
