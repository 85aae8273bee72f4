#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "memfuse/calibration.hpp"
#include "memfuse/detector.hpp"
#include "memfuse/fuse.hpp"
#include "memfuse/loadline.hpp"

namespace memfuse::io {

inline constexpr std::string_view kToolName = "memfuse";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Six significant digits, as used in every CSV.
[[nodiscard]] std::string format_number(double v);

/// "# memfuse 0.1.0 config=<compact json>"
[[nodiscard]] std::string provenance_line(const nlohmann::json& config);

// Writers. Each emits the provenance comment, the header, then one row per item.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const nlohmann::json& config);
void write_load_line_csv(std::ostream& os, const LoadLine& line, const nlohmann::json& config);
void write_scan_csv(std::ostream& os, std::span<const ScanEntry> entries, const nlohmann::json& config);
void write_sensitivity_csv(std::ostream& os, std::span<const SensitivitySample> samples,
                           const nlohmann::json& config);
void write_detections_csv(std::ostream& os, std::span<const DetectionEvent> events, const nlohmann::json& config);

// Readers. '#' lines and blank lines are skipped; throw ParseError on bad input.
[[nodiscard]] std::vector<SensitivitySample> read_sensitivity_csv(std::istream& is);
[[nodiscard]] std::vector<Volts> read_events_csv(std::istream& is);

/// Flat parameter document: a_plus, a_minus, v_th_plus, v_th_minus, rss, n_samples.
/// A polarity that could not be fitted has null values and is listed under "missing".
[[nodiscard]] nlohmann::json fit_to_json(const FitResult& fit);

// Config documents -----------------------------------------------------------

/// Device from {"preset": "M1", "r0": ..., explicit overrides...}.
[[nodiscard]] MemristorState device_from_json(const nlohmann::json& j, std::string_view default_preset);

/// Fuse from {"fwd": {...}, "rev": {...}, "connection": ..., "initial": ...}.
[[nodiscard]] FuseState fuse_from_json(const nlohmann::json& j);

[[nodiscard]] std::vector<PulseTrain> trains_from_json(const nlohmann::json& j);
[[nodiscard]] DetectorConfig detector_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const MemristorState& s);
[[nodiscard]] nlohmann::json to_json(const FuseState& f);

}  // namespace memfuse::io
