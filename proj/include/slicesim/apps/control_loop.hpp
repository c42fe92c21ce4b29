#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "slicesim/apps/path.hpp"
#include "slicesim/apps/robot.hpp"
#include "slicesim/common/time.hpp"

namespace slicesim::apps {

inline constexpr std::size_t kControlMessageBytes = 32;
using ControlWire = std::array<std::byte, kControlMessageBytes>;

/// Downlink wheel-speed command. `seq` echoes the feedback it answers.
struct ControlCommand {
    double omega_left_cmd = 0.0;
    double omega_right_cmd = 0.0;
    std::uint64_t seq = 0;

    bool operator==(const ControlCommand&) const = default;
};

/// Uplink encoder report.
struct ControlFeedback {
    std::int64_t encoder_left = 0;
    std::int64_t encoder_right = 0;
    std::uint64_t seq = 0;
    SimTime timestamp{};

    bool operator==(const ControlFeedback&) const = default;
};

ControlWire encode(const ControlCommand& c);
ControlWire encode(const ControlFeedback& f);
/// Throws std::invalid_argument unless exactly 32 bytes.
ControlCommand decode_command(std::span<const std::byte> wire);
ControlFeedback decode_feedback(std::span<const std::byte> wire);

struct RobotAppConfig {
    RobotGeometry geometry;
    PathSpec path;
    ControllerGains gains;
    Pose initial_pose{0.0, 0.0, 0.0};
    SimTime control_period = std::chrono::milliseconds(20);
    SimTime physics_dt = std::chrono::milliseconds(1);
    std::int64_t message_bytes = kControlMessageBytes;
    double settle_time_s = 5.0;  // cross-track RMS is also reported from here on

    void validate() const;
};

/// Robot end: integrates physics, applies the latest delivered command at its
/// own periodic tick (zero-order hold) and reports encoders.
class RobotSide {
public:
    explicit RobotSide(const RobotAppConfig& cfg);

    /// Integrates physics up to `now` in steps of at most physics_dt.
    void advance_to(SimTime now);
    /// Periodic tick: latch the newest delivered command, then sample encoders.
    ControlFeedback tick(SimTime now);
    /// Stores a delivered command; older sequence numbers are ignored.
    void deliver(const ControlCommand& cmd);

    const RobotState& state() const { return state_; }
    std::optional<std::uint64_t> applied_seq() const { return applied_seq_; }

private:
    SimTime physics_dt_;
    RobotState state_;
    SimTime integrated_to_{};
    std::optional<ControlCommand> pending_;
    std::optional<std::uint64_t> applied_seq_;
    std::uint64_t next_seq_ = 1;
};

/// Path-controller end: dead-reckons from encoder feedback and steers.
class ControllerSide {
public:
    explicit ControllerSide(const RobotAppConfig& cfg);

    /// Returns the answering command; stale or duplicate feedback yields none.
    std::optional<ControlCommand> on_feedback(const ControlFeedback& fb);

    const Pose& estimate() const { return estimate_; }

private:
    RobotAppConfig cfg_;
    Pose estimate_;
    std::int64_t last_left_ = 0;
    std::int64_t last_right_ = 0;
    std::optional<std::uint64_t> last_seq_;
};

struct CrossTrackSample {
    SimTime t{};
    double error = 0.0;
};

/// One closed control loop plus its measurements.
class ControlLoop {
public:
    explicit ControlLoop(const RobotAppConfig& cfg);

    /// Robot tick at `now`; returns the feedback to send uplink.
    ControlFeedback robot_tick(SimTime now);
    /// Feedback arrived at the controller; returns the command to send downlink.
    std::optional<ControlCommand> controller_receive(const ControlFeedback& fb, SimTime now);
    /// Command arrived at the robot.
    void robot_receive(const ControlCommand& cmd, SimTime now);

    RobotSide& robot() { return robot_; }
    const RobotSide& robot() const { return robot_; }
    const ControllerSide& controller() const { return controller_; }
    const RobotAppConfig& config() const { return cfg_; }

    /// Feedback emission to delivery of the answering command.
    const std::vector<SimTime>& rtt_samples() const { return rtt_; }
    /// Feedback emission to the robot tick that applied the answering command.
    const std::vector<SimTime>& apply_lags() const { return apply_lag_; }
    const std::vector<CrossTrackSample>& cross_track() const { return cross_track_; }

private:
    RobotAppConfig cfg_;
    RobotSide robot_;
    ControllerSide controller_;
    std::map<std::uint64_t, SimTime> emitted_;
    std::vector<SimTime> rtt_;
    std::vector<SimTime> apply_lag_;
    std::vector<CrossTrackSample> cross_track_;
    std::optional<std::uint64_t> last_applied_;
};

/// Fixed-delay link for exercising a loop without the radio model.
struct IdealLink {
    SimTime uplink_delay{};
    SimTime downlink_delay{};
    /// Uplink messages sent at or after this time are dropped.
    std::optional<SimTime> uplink_cutoff;
};

/// Runs one loop over an ideal link for `duration`.
ControlLoop run_closed_loop(const RobotAppConfig& cfg, const IdealLink& link, SimTime duration);

/// RMS of cross-track samples taken at or after `from`.
double cross_track_rms(const std::vector<CrossTrackSample>& samples, SimTime from = SimTime{});

}  // namespace slicesim::apps
