#include "slicesim/apps/control_loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "slicesim/common/error.hpp"
#include "slicesim/common/event_queue.hpp"

namespace slicesim::apps {

namespace {

template <typename T>
void put(ControlWire& w, std::size_t offset, T value) {
    static_assert(sizeof(T) == 8);
    std::memcpy(w.data() + offset, &value, sizeof(T));
}

template <typename T>
T get(std::span<const std::byte> w, std::size_t offset) {
    T value;
    std::memcpy(&value, w.data() + offset, sizeof(T));
    return value;
}

void check_size(std::span<const std::byte> wire) {
    if (wire.size() != kControlMessageBytes) {
        throw std::invalid_argument("control message must be 32 bytes");
    }
}

}  // namespace

// Layout (host byte order): two 8-byte fields, seq, then timestamp or padding.
ControlWire encode(const ControlCommand& c) {
    ControlWire w{};
    put(w, 0, c.omega_left_cmd);
    put(w, 8, c.omega_right_cmd);
    put(w, 16, c.seq);
    return w;
}

ControlWire encode(const ControlFeedback& f) {
    ControlWire w{};
    put(w, 0, f.encoder_left);
    put(w, 8, f.encoder_right);
    put(w, 16, f.seq);
    put(w, 24, f.timestamp.count());
    return w;
}

ControlCommand decode_command(std::span<const std::byte> wire) {
    check_size(wire);
    return {get<double>(wire, 0), get<double>(wire, 8), get<std::uint64_t>(wire, 16)};
}

ControlFeedback decode_feedback(std::span<const std::byte> wire) {
    check_size(wire);
    return {get<std::int64_t>(wire, 0), get<std::int64_t>(wire, 8), get<std::uint64_t>(wire, 16),
            SimTime{get<std::int64_t>(wire, 24)}};
}

void RobotAppConfig::validate() const {
    geometry.validate();
    path.validate();
    if (control_period <= SimTime::zero()) throw ConfigError("control period must be positive");
    if (physics_dt <= SimTime::zero()) throw ConfigError("physics dt must be positive");
    if (message_bytes < static_cast<std::int64_t>(kControlMessageBytes)) {
        throw ConfigError("control messages are at least 32 bytes");
    }
    if (!(gains.k_cross_track > 0.0) || !(gains.k_heading > 0.0) || !(gains.omega_max > 0.0)) {
        throw ConfigError("controller gains and omega_max must be positive");
    }
}

RobotSide::RobotSide(const RobotAppConfig& cfg) : physics_dt_(cfg.physics_dt) {
    state_.pose = cfg.initial_pose;
    state_.pose.theta = normalize_angle(state_.pose.theta);
    state_.geometry = cfg.geometry;
}

void RobotSide::advance_to(SimTime now) {
    while (integrated_to_ < now) {
        const SimTime step = std::min(physics_dt_, now - integrated_to_);
        state_ = robot_step(state_, to_seconds(step));
        integrated_to_ += step;
    }
}

ControlFeedback RobotSide::tick(SimTime now) {
    advance_to(now);
    if (pending_) {
        state_.omega_left = pending_->omega_left_cmd;
        state_.omega_right = pending_->omega_right_cmd;
        applied_seq_ = pending_->seq;
        pending_.reset();
    }
    return {state_.encoder_left, state_.encoder_right, next_seq_++, now};
}

void RobotSide::deliver(const ControlCommand& cmd) {
    const std::uint64_t newest = pending_ ? pending_->seq : applied_seq_.value_or(0);
    if ((pending_ || applied_seq_) && cmd.seq <= newest) return;
    pending_ = cmd;
}

ControllerSide::ControllerSide(const RobotAppConfig& cfg) : cfg_(cfg), estimate_(cfg.initial_pose) {}

std::optional<ControlCommand> ControllerSide::on_feedback(const ControlFeedback& fb) {
    if (last_seq_ && fb.seq <= *last_seq_) return std::nullopt;
    last_seq_ = fb.seq;
    estimate_ = odometry_update(estimate_, fb.encoder_left - last_left_,
                                fb.encoder_right - last_right_, cfg_.geometry);
    last_left_ = fb.encoder_left;
    last_right_ = fb.encoder_right;
    const auto wheels = path_controller_step(estimate_, cfg_.path, cfg_.gains,
                                             cfg_.path.cruise_speed, cfg_.geometry);
    return ControlCommand{wheels.omega_left, wheels.omega_right, fb.seq};
}

ControlLoop::ControlLoop(const RobotAppConfig& cfg) : cfg_(cfg), robot_(cfg), controller_(cfg) {}

ControlFeedback ControlLoop::robot_tick(SimTime now) {
    const auto fb = robot_.tick(now);
    if (robot_.applied_seq() && robot_.applied_seq() != last_applied_) {
        last_applied_ = robot_.applied_seq();
        if (auto it = emitted_.find(*last_applied_); it != emitted_.end()) {
            apply_lag_.push_back(now - it->second);
        }
    }
    emitted_[fb.seq] = now;
    // Keep only recent emissions; anything older than 1000 periods is stale.
    while (emitted_.size() > 1000) emitted_.erase(emitted_.begin());
    const auto& pose = robot_.state().pose;
    cross_track_.push_back({now, project_onto_path(cfg_.path, {pose.x, pose.y}).cross_track});
    return fb;
}

std::optional<ControlCommand> ControlLoop::controller_receive(const ControlFeedback& fb, SimTime) {
    return controller_.on_feedback(fb);
}

void ControlLoop::robot_receive(const ControlCommand& cmd, SimTime now) {
    if (auto it = emitted_.find(cmd.seq); it != emitted_.end()) {
        rtt_.push_back(now - it->second);
    }
    robot_.deliver(cmd);
}

ControlLoop run_closed_loop(const RobotAppConfig& cfg, const IdealLink& link, SimTime duration) {
    cfg.validate();
    ControlLoop loop(cfg);
    EventQueue events;
    std::function<void(SimTime)> tick = [&](SimTime now) {
        const auto fb = loop.robot_tick(now);
        if (!(link.uplink_cutoff && now >= *link.uplink_cutoff)) {
            events.schedule(now + link.uplink_delay, EventClass::AppTimer, [&, fb, now] {
                const SimTime at = now + link.uplink_delay;
                if (auto cmd = loop.controller_receive(fb, at)) {
                    events.schedule(at + link.downlink_delay, EventClass::AppTimer,
                                    [&, c = *cmd, t = at + link.downlink_delay] {
                                        loop.robot_receive(c, t);
                                    });
                }
            });
        }
        const SimTime next = now + cfg.control_period;
        if (next <= duration) {
            events.schedule(next, EventClass::TtiBoundary, [&, next] { tick(next); });
        }
    };
    events.schedule(SimTime{}, EventClass::TtiBoundary, [&] { tick(SimTime{}); });
    while (!events.empty() && events.next_time() <= duration) events.pop().fire();
    loop.robot().advance_to(duration);
    return loop;
}

double cross_track_rms(const std::vector<CrossTrackSample>& samples, SimTime from) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
        if (s.t < from) continue;
        sum += s.error * s.error;
        ++n;
    }
    return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

}  // namespace slicesim::apps
