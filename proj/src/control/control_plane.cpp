#include "slicesim/control/control_plane.hpp"

#include <algorithm>

namespace slicesim::control {

ControlPlane::ControlPlane(SliceRegistry registry, SimTime stats_period, AutoscalePolicy autoscale,
                           std::size_t history_limit)
    : stats_period_(stats_period),
      history_limit_(history_limit),
      applied_(registry),
      internal_staged_(registry),
      staged_(registry),
      autoscaler_(autoscale) {
    autoscale.validate();
    for (const auto& [rnti, slice] : applied_.bindings()) {
        radio::UeContext ue;
        ue.rnti = rnti;
        ue.slice_id = slice;
        last_ues_.push_back(ue);
    }
    republish_locked(0, 0.0);
}

void ControlPlane::submit(const ControlMessage& m) {
    std::lock_guard lock(mu_);
    staged_.apply(m);
    inbox_.push_back(m);
}

SliceDescriptor ControlPlane::submit_patch(SliceId id, const json& patch) {
    std::lock_guard lock(mu_);
    if (!staged_.slicing_enabled()) throw ControlError(ErrorCode::SlicingDisabled, "slicing is disabled");
    const auto* current = staged_.find(id);
    if (!current) throw ControlError(ErrorCode::UnknownSliceId, "no slice " + std::to_string(id));
    auto cmd = SliceCommand::update(merge_patch(*current, patch));
    staged_.apply(cmd);
    inbox_.push_back(cmd);
    return cmd.descriptor;
}

void ControlPlane::submit_internal(const ControlMessage& m, const std::string& origin) {
    std::lock_guard lock(mu_);
    internal_staged_.apply(m);
    internal_.emplace_back(m, origin);
    // Keep the external view consistent; a clash surfaces at drain time.
    try {
        staged_.apply(m);
    } catch (const ControlError&) {
    }
}

void ControlPlane::schedule_replay(std::vector<CommandLogEntry> log) {
    std::lock_guard lock(mu_);
    std::ranges::stable_sort(log, {}, &CommandLogEntry::tti);
    replay_.assign(log.begin(), log.end());
}

std::vector<json> ControlPlane::drain(std::uint64_t tti) {
    std::lock_guard lock(mu_);
    while (!replay_.empty() && replay_.front().tti <= tti) {
        try {
            inbox_.push_back(message_from_json(replay_.front().message));
        } catch (const ControlError& e) {
            rejected_.push_back({tti, "replay", replay_.front().message, e.what()});
        }
        replay_.pop_front();
    }
    std::vector<json> out;
    if (internal_.empty() && inbox_.empty()) return out;

    for (auto& [m, origin] : internal_) {
        try {
            applied_.apply(m);
            out.push_back(to_json(m));
        } catch (const ControlError& e) {
            reject_locked(tti, origin, m, e);
        }
    }
    for (auto& m : inbox_) {
        log_.push_back({tti, to_json(m)});
        try {
            applied_.apply(m);
            out.push_back(to_json(m));
        } catch (const ControlError& e) {
            reject_locked(tti, "northbound", m, e);
        }
    }
    internal_.clear();
    inbox_.clear();
    internal_staged_ = applied_;
    staged_ = applied_;
    if (!out.empty()) {
        for (auto& ue : last_ues_) {
            if (auto it = applied_.bindings().find(ue.rnti); it != applied_.bindings().end()) {
                ue.slice_id = it->second;
            }
        }
        republish_locked(tti, snapshot_ ? snapshot_->t : 0.0);
    }
    return out;
}

void ControlPlane::reject_locked(std::uint64_t tti, const std::string& origin, const ControlMessage& m,
                                 const ControlError& e) {
    rejected_.push_back({tti, origin, to_json(m), std::string(to_string(e.code())) + ": " + e.what()});
}

void ControlPlane::publish(const StatsReport& report, std::vector<radio::UeContext> ues, std::uint64_t tti) {
    std::vector<SliceCommand> cmds;
    {
        std::lock_guard lock(mu_);
        history_.push_back(report);
        if (history_.size() > history_limit_) history_.pop_front();
        last_ues_ = std::move(ues);
        republish_locked(tti, report.window_end);
        frame_ = telemetry_frame(report, applied_.slices()).dump();
        ++frame_seq_;
        cmds = autoscaler_.on_report(report, internal_staged_);
    }
    frame_cv_.notify_all();
    for (const auto& c : cmds) {
        try {
            submit_internal(c, "autoscale");
        } catch (const ControlError& e) {
            std::lock_guard lock(mu_);
            reject_locked(tti, "autoscale", c, e);
        }
    }
}

void ControlPlane::set_autoscale(const AutoscalePolicy& p) {
    std::lock_guard lock(mu_);
    autoscaler_.set_policy(p);
}

void ControlPlane::republish_locked(std::uint64_t tti, double t) {
    auto s = std::make_shared<Snapshot>();
    s->tti = tti;
    s->t = t;
    s->slicing_enabled = applied_.slicing_enabled();
    s->slices = applied_.slices();
    s->ues = last_ues_;
    snapshot_ = std::move(s);
}

std::shared_ptr<const Snapshot> ControlPlane::snapshot() const {
    std::lock_guard lock(mu_);
    return snapshot_;
}

StatsReport ControlPlane::stats(SimTime window) const {
    if (window <= SimTime{}) throw ControlError(ErrorCode::BadRequest, "window must be positive");
    std::lock_guard lock(mu_);
    if (history_.empty()) throw ControlError(ErrorCode::BadRequest, "no stats recorded yet");
    const auto periods = static_cast<std::size_t>((window + stats_period_ - SimTime{1}) / stats_period_);
    const auto n = std::min(periods, history_.size());
    std::vector<StatsReport> tail(history_.end() - static_cast<std::ptrdiff_t>(n), history_.end());
    return merge(tail);
}

std::optional<std::string> ControlPlane::wait_frame(std::uint64_t& seen, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    frame_cv_.wait_for(lock, timeout, [&] { return closed_ || frame_seq_ > seen; });
    if (closed_ || frame_seq_ <= seen) return std::nullopt;
    seen = frame_seq_;
    return frame_;
}

void ControlPlane::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    frame_cv_.notify_all();
}

bool ControlPlane::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

SliceRegistry ControlPlane::registry() const {
    std::lock_guard lock(mu_);
    return applied_;
}

std::vector<CommandLogEntry> ControlPlane::command_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::vector<RejectedCommand> ControlPlane::rejected() const {
    std::lock_guard lock(mu_);
    return rejected_;
}

std::vector<StatsReport> ControlPlane::history() const {
    std::lock_guard lock(mu_);
    return {history_.begin(), history_.end()};
}

}  // namespace slicesim::control
