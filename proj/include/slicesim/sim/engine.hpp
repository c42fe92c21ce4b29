#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "slicesim/apps/control_loop.hpp"
#include "slicesim/apps/event_source.hpp"
#include "slicesim/apps/video.hpp"
#include "slicesim/common/event_queue.hpp"
#include "slicesim/control/agent.hpp"
#include "slicesim/control/control_plane.hpp"
#include "slicesim/radio/transport.hpp"
#include "slicesim/sim/report.hpp"
#include "slicesim/sim/scenario.hpp"

namespace slicesim::sim {

/// What one TTI looked like, for observers.
struct TtiTrace {
    std::uint64_t tti = 0;
    SimTime start{};
    /// UE contexts as the allocator saw them (queues before service).
    const std::vector<radio::UeContext>& demand;
    const std::vector<radio::SliceDescriptor>& slices;
    const radio::TtiAllocation& downlink;
    const radio::TtiAllocation& uplink;
};

struct EngineHooks {
    std::function<void(const TtiTrace&)> on_tti;
    std::function<void(const radio::DeliveredPacket&)> on_delivery;
};

/// Deterministic discrete-event run of one scenario.
///
/// Every TTI boundary: finish the previous TTI's telemetry (and publish stats
/// at period ends), apply queued control messages, release retransmissions,
/// allocate both directions, drain transport queues, advance video playout,
/// audit. Application timers and packet deliveries run as events between
/// boundaries. Throws InvariantViolation when an audit check fails.
class Engine {
public:
    explicit Engine(ScenarioConfig cfg, EngineHooks hooks = {});
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    control::ControlPlane& control_plane() { return *plane_; }
    const ScenarioConfig& config() const { return cfg_; }

    /// Runs every event before TTI `tti_end` (or the end of the scenario).
    void step_until(std::uint64_t tti_end);
    /// Ends the run at the next TTI boundary. Safe from any thread.
    void request_stop() { stop_requested_ = true; }
    /// Ends the run when TTI `tti` is reached (replay of a stopped session).
    void stop_at(std::uint64_t tti) { stop_at_ = tti; }

    bool finished() const { return finished_; }
    std::uint64_t next_tti() const { return next_tti_; }

    /// Runs to completion and returns the report.
    Report run();
    /// Closes the run and builds the report; step_until must have finished.
    Report finish();

private:
    struct RobotApp;
    struct OperatorApp;
    struct VideoApp;

    void on_tti(std::uint64_t k);
    void close_tti_record(std::uint64_t k);
    void publish_stats(SimTime from, SimTime to, std::uint64_t tti);
    void on_delivery(const radio::DeliveredPacket& d);
    void on_timeline(const TimelineAction& a);
    void audit(std::uint64_t k, const radio::TtiAllocation& dl, const radio::TtiAllocation& ul);
    void enqueue(Rnti rnti, radio::Direction dir, std::uint32_t flow, std::int64_t size,
                 std::vector<std::byte> payload, SimTime now);
    void schedule_robot_tick(RobotApp& app, SimTime at);
    void schedule_operator(OperatorApp& app);
    void schedule_video_segment(VideoApp& app, SimTime at);

    ScenarioConfig cfg_;
    EngineHooks hooks_;
    std::uint64_t total_ttis_;
    std::uint64_t period_ttis_;

    std::unique_ptr<control::ControlPlane> plane_;
    std::unique_ptr<control::Agent> agent_;
    radio::Transport transport_;
    EventQueue events_;

    std::vector<std::unique_ptr<RobotApp>> robots_;
    std::vector<std::unique_ptr<OperatorApp>> operators_;
    std::vector<std::unique_ptr<VideoApp>> videos_;
    std::map<Rnti, RobotApp*> robot_by_rnti_;
    std::map<Rnti, OperatorApp*> operator_by_rnti_;
    std::map<Rnti, VideoApp*> video_by_rnti_;

    control::TelemetryBuffer telemetry_;
    std::optional<control::TtiRecord> open_record_;
    std::map<Rnti, control::PerDirection> delivered_bits_;
    std::vector<control::StatsReport> period_reports_;
    std::uint64_t last_report_tti_ = 0;

    // Realized vs configured shares, summed per TTI.
    std::map<SliceId, std::array<std::int64_t, 2>> granted_prbs_;
    std::map<SliceId, std::array<std::int64_t, 2>> configured_ppm_;
    std::uint64_t ttis_run_ = 0;

    std::vector<control::RejectedCommand> timeline_rejections_;

    std::uint64_t next_tti_ = 0;
    std::atomic<bool> stop_requested_{false};
    std::optional<std::uint64_t> stop_at_;
    std::optional<std::uint64_t> stopped_at_;
    bool finished_ = false;
    bool closed_ = false;
};

/// Runs a scenario in batch mode.
Report run_scenario(const ScenarioConfig& cfg, EngineHooks hooks = {});

}  // namespace slicesim::sim
