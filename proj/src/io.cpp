#include "memfuse/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace memfuse::io {

using nlohmann::json;

std::string format_number(double v) {
    if (v == 0.0) return "0";  // avoids "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string provenance_line(const json& config) {
    std::string line = "# ";
    line += kToolName;
    line += ' ';
    line += kToolVersion;
    line += " config=";
    line += config.dump();
    return line;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& config) {
    os << provenance_line(config) << '\n' << "pulse_index,v_b,v_x,r_fwd,r_rev,r_fuse\n";
    for (const auto& r : traj.records) {
        os << r.pulse_index << ',' << format_number(r.v_b) << ',' << format_number(r.v_x) << ','
           << format_number(r.r_fwd) << ',' << format_number(r.r_rev) << ',' << format_number(r.r_fuse) << '\n';
    }
}

void write_load_line_csv(std::ostream& os, const LoadLine& line, const json& config) {
    os << provenance_line(config) << '\n' << "v_x,delta_fwd,delta_rev\n";
    for (std::size_t i = 0; i < line.grid.size(); ++i) {
        os << format_number(line.grid[i]) << ',' << format_number(line.delta_fwd[i]) << ','
           << format_number(line.delta_rev[i]) << '\n';
    }
}

void write_scan_csv(std::ostream& os, std::span<const ScanEntry> entries, const json& config) {
    os << provenance_line(config) << '\n' << "amplitude,dip_depth,recovery,rebound,total_dR_fwd,total_dR_rev,qualifies\n";
    for (const auto& e : entries) {
        os << format_number(e.amplitude) << ',' << format_number(e.metrics.dip_depth) << ','
           << format_number(e.metrics.recovery) << ',' << format_number(e.metrics.rebound) << ','
           << format_number(e.metrics.total_dr_fwd) << ','
           << format_number(e.metrics.total_dr_rev) << ',' << (e.qualifies ? 1 : 0) << '\n';
    }
}

void write_sensitivity_csv(std::ostream& os, std::span<const SensitivitySample> samples, const json& config) {
    os << provenance_line(config) << '\n'
       << "# delta_r is the read-out change per pulse (ohm), read at +0.2 V\n"
       << "v,delta_r,weight\n";
    for (const auto& s : samples) {
        os << format_number(s.v) << ',' << format_number(s.delta_r) << ',' << format_number(s.weight) << '\n';
    }
}

void write_detections_csv(std::ostream& os, std::span<const DetectionEvent> events, const json& config) {
    os << provenance_line(config) << '\n' << "pulse_index,r_fuse,running_max\n";
    for (const auto& e : events) {
        os << e.pulse_index << ',' << format_number(e.r_fuse_at_detection) << ',' << format_number(e.running_max)
           << '\n';
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& cell, long line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": not a finite number: '" + cell + "'");
    }
}

/// Reads data rows after a header; returns header columns via `header`.
std::vector<std::vector<std::string>> read_rows(std::istream& is, std::vector<std::string>& header,
                                                std::vector<long>& line_numbers) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!have_header) {
            header = split(t);
            have_header = true;
            continue;
        }
        rows.push_back(split(t));
        line_numbers.push_back(line_no);
    }
    if (!have_header) throw ParseError("missing CSV header");
    return rows;
}

}  // namespace

std::vector<SensitivitySample> read_sensitivity_csv(std::istream& is) {
    std::vector<std::string> header;
    std::vector<long> lines;
    const auto rows = read_rows(is, header, lines);
    const bool weighted = header.size() == 3 && header[2] == "weight";
    if (header.size() < 2 || header[0] != "v" || header[1] != "delta_r" || (header.size() == 3 && !weighted) ||
        header.size() > 3) {
        throw ParseError("expected header 'v,delta_r[,weight]'");
    }
    std::vector<SensitivitySample> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) {
            throw ParseError("line " + std::to_string(lines[i]) + ": expected " + std::to_string(header.size()) +
                             " columns");
        }
        SensitivitySample s{parse_double(r[0], lines[i]), parse_double(r[1], lines[i]), 1.0};
        if (weighted) {
            s.weight = parse_double(r[2], lines[i]);
            if (s.weight < 0.0) throw ParseError("line " + std::to_string(lines[i]) + ": negative weight");
        }
        out.push_back(s);
    }
    return out;
}

std::vector<Volts> read_events_csv(std::istream& is) {
    std::vector<std::string> header;
    std::vector<long> lines;
    const auto rows = read_rows(is, header, lines);
    if (header.size() != 1 || header[0] != "amplitude") throw ParseError("expected header 'amplitude'");
    std::vector<Volts> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 1) throw ParseError("line " + std::to_string(lines[i]) + ": expected 1 column");
        out.push_back(parse_double(rows[i][0], lines[i]));
    }
    return out;
}

json fit_to_json(const FitResult& fit) {
    json j;
    j["a_plus"] = fit.forward ? json(fit.forward->scale) : json(nullptr);
    j["v_th_plus"] = fit.forward ? json(fit.forward->threshold) : json(nullptr);
    j["a_minus"] = fit.reverse ? json(fit.reverse->scale) : json(nullptr);
    j["v_th_minus"] = fit.reverse ? json(fit.reverse->threshold) : json(nullptr);
    j["rss"] = fit.rss;
    j["n_samples"] = fit.n_samples;
    if (!fit.complete()) {
        json missing = json::array();
        if (!fit.forward) missing.push_back("forward");
        if (!fit.reverse) missing.push_back("reverse");
        j["missing"] = missing;
    }
    return j;
}

// ---------------------------------------------------------------------------

namespace {

double number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(std::string("'") + key + "' must be finite");
    return d;
}

IVModel iv_from_json(const json& j) {
    if (j.is_string()) return iv_from_json(json{{"kind", j}});
    const std::string kind = j.value("kind", "linear");
    if (kind == "linear") return LinearIV{};
    if (kind == "odd_polynomial") return OddPolynomialIV{number(j, "c3")};
    if (kind == "asymmetric") return AsymmetricIV{number(j, "c3_fwd"), number(j, "c3_rev")};
    throw ParseError("unknown iv kind '" + kind + "'");
}

json iv_to_json(const IVModel& iv) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearIV>) {
                return {{"kind", "linear"}};
            } else if constexpr (std::is_same_v<T, OddPolynomialIV>) {
                return {{"kind", "odd_polynomial"}, {"c3", m.c3}};
            } else {
                return {{"kind", "asymmetric"}, {"c3_fwd", m.c3_fwd}, {"c3_rev", m.c3_rev}};
            }
        },
        iv);
}

}  // namespace

MemristorState device_from_json(const json& j, std::string_view default_preset) {
    if (!j.is_object() && !j.is_null()) throw ParseError("device definition must be an object");
    const json d = j.is_null() ? json::object() : j;
    const std::string name = d.value("preset", std::string(default_preset));
    MemristorState s;
    try {
        s = preset_state(name);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    if (d.contains("cubic_a")) {
        s.switching = OddCubicSwitching{number(d, "cubic_a")};
    } else {
        auto p = std::get<SwitchingParams>(s.switching);
        if (d.contains("a_plus")) p.a_plus = number(d, "a_plus");
        if (d.contains("a_minus")) p.a_minus = number(d, "a_minus");
        if (d.contains("v_th_plus")) p.v_th_plus = number(d, "v_th_plus");
        if (d.contains("v_th_minus")) p.v_th_minus = number(d, "v_th_minus");
        s.switching = p;
    }
    if (d.contains("r_floor")) s.bounds.r_floor = number(d, "r_floor");
    if (d.contains("r_ceiling")) s.bounds.r_ceiling = number(d, "r_ceiling");
    if (d.contains("r0")) s.r = number(d, "r0");
    if (d.contains("iv")) s.iv = iv_from_json(d.at("iv"));
    if (d.contains("window")) {
        const std::string w = d.at("window").get<std::string>();
        if (w == "none") {
            s.window = NoWindow{};
        } else if (w == "linear_boundary") {
            s.window = LinearBoundaryWindow{};
        } else {
            throw ParseError("unknown window '" + w + "'");
        }
    }
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("invalid device: ") + e.what());
    }
    return s;
}

FuseState fuse_from_json(const json& j) {
    const json cfg = j.is_null() ? json::object() : j;
    FuseState f;
    f.fwd = device_from_json(cfg.value("fwd", json::object()), "M2");
    f.rev = device_from_json(cfg.value("rev", json::object()), "M1");
    const std::string conn = cfg.value("connection", "anti-serial");
    if (conn == "anti-serial") {
        f.connection = Connection::AntiSerial;
    } else if (conn == "series") {
        f.connection = Connection::Series;
    } else {
        throw ParseError("unknown connection '" + conn + "'");
    }
    const std::string initial = cfg.value("initial", "base");
    if (initial == "saturated-positive" || initial == "saturated-negative") {
        const bool fwd_r0 = cfg.value("fwd", json::object()).contains("r0");
        const bool rev_r0 = cfg.value("rev", json::object()).contains("r0");
        const FuseState sat = saturate(f, initial == "saturated-positive" ? 1 : -1);
        if (!fwd_r0) f.fwd.r = sat.fwd.r;
        if (!rev_r0) f.rev.r = sat.rev.r;
    } else if (initial != "base") {
        throw ParseError("unknown initial state '" + initial + "'");
    }
    return f;
}

std::vector<PulseTrain> trains_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("'trains' must be an array");
    std::vector<PulseTrain> out;
    for (const auto& t : j) {
        PulseTrain p;
        p.amplitude = number(t, "amplitude");
        const double count = number(t, "count");
        if (count < 0 || count != std::floor(count)) throw ParseError("train count must be a nonnegative integer");
        p.count = static_cast<long>(count);
        if (t.contains("width")) p.width = number(t, "width");
        out.push_back(p);
    }
    return out;
}

DetectorConfig detector_from_json(const json& j) {
    DetectorConfig c;
    if (j.is_null()) return c;
    if (j.contains("rel_drop_threshold")) c.rel_drop_threshold = number(j, "rel_drop_threshold");
    if (j.contains("arm_after")) c.arm_after = static_cast<long>(number(j, "arm_after"));
    if (j.contains("refractory")) c.refractory = static_cast<long>(number(j, "refractory"));
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("invalid detector config: ") + e.what());
    }
    return c;
}

json to_json(const MemristorState& s) {
    json j;
    j["r0"] = s.r;
    j["r_floor"] = s.bounds.r_floor;
    j["r_ceiling"] = s.bounds.r_ceiling;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SwitchingParams>) {
                j["a_plus"] = m.a_plus;
                j["a_minus"] = m.a_minus;
                j["v_th_plus"] = m.v_th_plus;
                j["v_th_minus"] = m.v_th_minus;
            } else {
                j["cubic_a"] = m.a;
            }
        },
        s.switching);
    j["iv"] = iv_to_json(s.iv);
    j["window"] = std::holds_alternative<NoWindow>(s.window) ? "none" : "linear_boundary";
    return j;
}

json to_json(const FuseState& f) {
    return {{"fwd", to_json(f.fwd)},
            {"rev", to_json(f.rev)},
            {"connection", f.connection == Connection::AntiSerial ? "anti-serial" : "series"}};
}

}  // namespace memfuse::io
