#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicesim/control/control_plane.hpp"
#include "slicesim/radio/slice.hpp"

namespace slicesim::sim {

using nlohmann::json;
using radio::Rnti;
using radio::SliceId;

inline constexpr std::string_view kVersion = "slicesim 1.0.0";

struct ThroughputPoint {
    double t = 0.0;  // end of the stats period, s
    Rnti rnti = 0;
    SliceId slice_id = 0;
    double dl_mbps = 0.0;
    double ul_mbps = 0.0;
};

/// Nearest-rank percentiles; empty without samples.
struct Percentiles {
    std::optional<double> p50, p95, p99;
};

Percentiles percentiles(std::vector<double> samples);

struct CrossTrackPoint {
    double t = 0.0;
    double error_m = 0.0;
};

struct RobotReport {
    Rnti rnti = 0;
    std::vector<double> rtt_ms;
    Percentiles rtt;
    std::vector<CrossTrackPoint> cross_track;
    double settle_time_s = 0.0;
    double cross_track_rms_m = 0.0;  // samples at or after settle_time_s
};

struct OperatorReport {
    Rnti rnti = 0;
    std::vector<double> latency_ms;  // delivered commands, in emission order
    std::int64_t emitted = 0;
    std::int64_t delivered = 0;
    std::int64_t deadline_met = 0;
    /// Commands whose deadline had passed by the end of the run.
    std::int64_t due = 0;
    double deadline_met_fraction = 1.0;
};

struct StallEvent {
    double start = 0.0;
    std::optional<double> end;
};

struct VideoReport {
    Rnti rnti = 0;
    double bitrate_bps = 0.0;
    std::int64_t delivered_bytes = 0;
    double goodput_bps = 0.0;
    int stall_count = 0;
    double total_stall_duration_s = 0.0;
    std::optional<double> playback_start_s;
    std::vector<StallEvent> stalls;
};

struct SliceShareReport {
    SliceId slice_id = 0;
    std::array<double, 2> configured{};  // time-averaged share, DL and UL
    std::array<double, 2> realized{};    // granted PRBs / grid PRBs
};

struct Report {
    json config;
    std::string version{kVersion};
    double duration_s = 0.0;
    double stats_period_s = 0.0;
    std::uint64_t ttis = 0;
    std::optional<std::uint64_t> stopped_at_tti;

    std::vector<ThroughputPoint> throughput;
    std::vector<RobotReport> robots;
    std::vector<OperatorReport> operators;
    std::vector<VideoReport> videos;
    std::vector<SliceShareReport> slice_shares;
    std::vector<std::string> audit_violations;
    std::vector<control::RejectedCommand> rejected_commands;
    std::vector<control::CommandLogEntry> commands;
};

json to_json(const Report& r);
/// The canonical serialization: sorted keys, two-space indent, trailing newline.
std::string canonical(const Report& r);

/// Writes throughput.csv, cross_track.csv, rtt.csv and event_latency.csv.
void write_csv(const Report& r, const std::filesystem::path& dir);

/// Command log file: {"commands": [{tti, message}], "stopped_at_tti": n|null}.
json command_log_json(const Report& r);
struct CommandLog {
    std::vector<control::CommandLogEntry> commands;
    std::optional<std::uint64_t> stopped_at_tti;
};
/// Throws ConfigError on malformed input.
CommandLog command_log_from_json(const json& j);

/// Video goodput and stalls restricted to (from, to].
struct VideoWindow {
    double goodput_bps = 0.0;
    int stalls = 0;
};
VideoWindow video_window(const Report& r, Rnti rnti, double from, double to);

}  // namespace slicesim::sim
