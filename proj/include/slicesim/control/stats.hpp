#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "slicesim/common/time.hpp"
#include "slicesim/radio/slice.hpp"

namespace slicesim::control {

using radio::Direction;
using radio::Rnti;
using radio::SliceId;

/// Per-direction counter, indexed by static_cast<int>(Direction).
using PerDirection = std::array<std::int64_t, 2>;

inline constexpr int idx(Direction d) { return static_cast<int>(d); }

struct UeTtiRecord {
    Rnti rnti = 0;
    SliceId slice_id = 0;
    PerDirection delivered_bits{};
    PerDirection queue_bytes{};  // at the end of the TTI
};

struct SliceTtiRecord {
    SliceId slice_id = 0;
    PerDirection quota_prbs{};
    PerDirection granted_prbs{};
};

/// What happened during one TTI [start, start + tti).
struct TtiRecord {
    std::uint64_t tti = 0;
    SimTime start{};
    std::vector<UeTtiRecord> ues;
    std::vector<SliceTtiRecord> slices;
};

/// Append-only per-TTI telemetry, optionally bounded to the most recent
/// `capacity` records.
class TelemetryBuffer {
public:
    explicit TelemetryBuffer(SimTime tti, std::size_t capacity = 0) : tti_(tti), capacity_(capacity) {}

    void push(TtiRecord r);

    SimTime tti() const { return tti_; }
    const std::deque<TtiRecord>& records() const { return records_; }

private:
    SimTime tti_;
    std::size_t capacity_;
    std::deque<TtiRecord> records_;
};

struct UeStats {
    Rnti rnti = 0;
    SliceId slice_id = 0;
    PerDirection delivered_bits{};
    std::array<double, 2> throughput_bps{};
    PerDirection queue_bytes{};

    double dl_throughput_bps() const { return throughput_bps[0]; }
    double ul_throughput_bps() const { return throughput_bps[1]; }
};

struct SliceStats {
    SliceId slice_id = 0;
    PerDirection quota_prbs{};
    /// Granted PRBs counted against the quota, i.e. min(granted, quota) per TTI.
    PerDirection used_prbs{};
    PerDirection granted_prbs{};

    /// used / quota, 0 when the quota was 0.
    double utilization(Direction d) const;
};

struct StatsReport {
    double window_start = 0.0;  // s
    double window_end = 0.0;    // s
    std::vector<UeStats> ues;      // ascending rnti
    std::vector<SliceStats> slices;  // ascending id

    const UeStats* ue(Rnti rnti) const;
    const SliceStats* slice(SliceId id) const;
};

/// Aggregates the records whose TTI starts in [start, end). Throughput is
/// delivered bits over the window length. Throws std::invalid_argument if
/// end <= start.
StatsReport report_stats(const TelemetryBuffer& buffer, SimTime start, SimTime end);

/// Combines reports over adjacent windows into one covering their union.
/// Throws std::invalid_argument on an empty list.
StatsReport merge(std::span<const StatsReport> reports);

}  // namespace slicesim::control
