#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "slicesim/common/time.hpp"
#include "slicesim/control/autoscale.hpp"
#include "slicesim/control/codec.hpp"
#include "slicesim/control/registry.hpp"
#include "slicesim/control/stats.hpp"

namespace slicesim::control {

/// An external command as drained at a TTI boundary.
struct CommandLogEntry {
    std::uint64_t tti = 0;
    json message;
};

struct RejectedCommand {
    std::uint64_t tti = 0;
    std::string origin;
    json message;
    std::string error;
};

/// Read-only view published for request handlers.
struct Snapshot {
    std::uint64_t tti = 0;
    double t = 0.0;
    bool slicing_enabled = true;
    std::vector<SliceDescriptor> slices;
    std::vector<radio::UeContext> ues;
};

/// The slicing controller.
///
/// External commands (REST) are validated against the registry as it will be
/// once everything already queued is applied, then parked in an inbox.
/// Internal commands (timeline, autoscale) come from the simulation thread
/// and go to a separate queue. At every TTI boundary drain() applies the
/// internal queue, then the inbox, each in arrival order, and returns the
/// southbound messages for the agent. Handlers read immutable snapshots.
class ControlPlane {
public:
    ControlPlane(SliceRegistry registry, SimTime stats_period, AutoscalePolicy autoscale = {},
                 std::size_t history_limit = 6000);

    // Any thread.

    /// Queues `m` for the next TTI boundary. Throws ControlError.
    void submit(const ControlMessage& m);
    /// Merges `patch` into the slice as it will be after queued commands and
    /// queues the resulting Update. Returns the merged descriptor.
    SliceDescriptor submit_patch(SliceId id, const json& patch);
    std::shared_ptr<const Snapshot> snapshot() const;
    /// Merges the most recent stats periods covering `window`. Throws
    /// ControlError(BadRequest) for a non-positive window or before the first
    /// report.
    StatsReport stats(SimTime window) const;
    /// Blocks until a telemetry frame newer than `seen` exists, the plane is
    /// closed or the timeout expires. Updates `seen` on success.
    std::optional<std::string> wait_frame(std::uint64_t& seen, std::chrono::milliseconds timeout) const;
    void close();
    bool closed() const;

    // Simulation thread.

    /// Throws ControlError; `origin` is kept for rejected-command records.
    void submit_internal(const ControlMessage& m, const std::string& origin);
    /// Messages to inject into the inbox at their recorded TTI (replay).
    void schedule_replay(std::vector<CommandLogEntry> log);
    std::vector<json> drain(std::uint64_t tti);
    /// Publishes the report for the stats period that just ended, then lets
    /// the autoscaler react.
    void publish(const StatsReport& report, std::vector<radio::UeContext> ues, std::uint64_t tti);
    void set_autoscale(const AutoscalePolicy& p);

    SimTime stats_period() const { return stats_period_; }
    /// Registry with every drained command applied.
    SliceRegistry registry() const;
    std::vector<CommandLogEntry> command_log() const;
    std::vector<RejectedCommand> rejected() const;
    std::vector<StatsReport> history() const;

private:
    void republish_locked(std::uint64_t tti, double t);
    void reject_locked(std::uint64_t tti, const std::string& origin, const ControlMessage& m,
                       const ControlError& e);

    mutable std::mutex mu_;
    mutable std::condition_variable frame_cv_;

    SimTime stats_period_;
    std::size_t history_limit_;
    SliceRegistry applied_;
    SliceRegistry internal_staged_;  // applied + internal queue
    SliceRegistry staged_;           // applied + internal queue + inbox
    std::vector<std::pair<ControlMessage, std::string>> internal_;
    std::vector<ControlMessage> inbox_;
    std::deque<CommandLogEntry> replay_;
    std::vector<CommandLogEntry> log_;
    std::vector<RejectedCommand> rejected_;
    Autoscaler autoscaler_;

    std::deque<StatsReport> history_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::vector<radio::UeContext> last_ues_;
    std::string frame_;
    std::uint64_t frame_seq_ = 0;
    bool closed_ = false;
};

}  // namespace slicesim::control
