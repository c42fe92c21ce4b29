#include "slicesim/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "slicesim/common/error.hpp"
#include "slicesim/radio/scheduler.hpp"

namespace slicesim::sim {

namespace {

constexpr std::uint32_t kFeedbackFlow = 1;
constexpr std::uint32_t kCommandFlow = 2;
constexpr std::uint32_t kOperatorFlow = 3;
constexpr std::uint32_t kVideoFlow = 4;

std::vector<std::byte> to_vector(const apps::ControlWire& w) { return {w.begin(), w.end()}; }

control::SliceRegistry initial_registry(const ScenarioConfig& cfg) {
    control::SliceRegistry reg;
    try {
        if (cfg.mode == Mode::Baseline) {
            const auto pool = radio::Share::from_fraction(cfg.baseline_pool_share);
            reg = control::SliceRegistry::unsliced(
                {radio::kUnslicedId, "shared", pool, pool, 0, radio::RbAvailability::High});
        } else {
            for (const auto& s : cfg.slices) reg.apply(control::SliceCommand::create(s));
        }
        for (const auto& u : cfg.ues) {
            reg.attach(u.rnti, cfg.mode == Mode::Baseline ? radio::kUnslicedId : u.slice_id);
        }
    } catch (const control::ControlError& e) {
        throw ConfigError(e.what());
    }
    return reg;
}

std::vector<radio::UeContext> initial_ues(const ScenarioConfig& cfg) {
    std::vector<radio::UeContext> out;
    for (const auto& u : cfg.ues) {
        radio::UeContext c;
        c.rnti = u.rnti;
        c.imsi = u.imsi;
        c.slice_id = cfg.mode == Mode::Baseline ? radio::kUnslicedId : u.slice_id;
        c.cqi_dl = u.cqi_dl;
        c.cqi_ul = u.cqi_ul;
        c.control_priority = u.control_priority;
        out.push_back(c);
    }
    return out;
}

std::uint64_t checked_ttis(const ScenarioConfig& cfg) {
    cfg.validate();
    return cfg.total_ttis();
}

}  // namespace

struct Engine::RobotApp {
    Rnti rnti;
    apps::ControlLoop loop;

    RobotApp(Rnti r, const apps::RobotAppConfig& cfg) : rnti(r), loop(cfg) {}
};

struct Engine::OperatorApp {
    Rnti rnti;
    apps::EventSource source;
    std::map<std::uint64_t, apps::OperatorCommand> in_flight;
    std::vector<double> latency_ms;
    std::int64_t emitted = 0;
    std::int64_t delivered = 0;
    std::int64_t met = 0;
};

struct Engine::VideoApp {
    Rnti rnti;
    apps::VideoServer server;
    apps::VideoSession session;
    std::int64_t pending_bytes = 0;
    std::vector<StallEvent> stalls;
    std::optional<double> playback_start;
};

Engine::Engine(ScenarioConfig cfg, EngineHooks hooks)
    : cfg_(std::move(cfg)),
      hooks_(std::move(hooks)),
      total_ttis_(checked_ttis(cfg_)),
      period_ttis_(cfg_.stats_period_ttis()),
      transport_(cfg_.link, cfg_.cell.tti, cfg_.seed),
      telemetry_(cfg_.cell.tti, static_cast<std::size_t>(2 * period_ttis_)) {
    const auto registry = initial_registry(cfg_);
    plane_ = std::make_unique<control::ControlPlane>(registry, from_seconds(cfg_.stats_period_s), cfg_.autoscale);
    agent_ = std::make_unique<control::Agent>(cfg_.cell, registry, initial_ues(cfg_), cfg_.allocation_options());

    for (const auto& u : cfg_.ues) {
        switch (u.app) {
            case AppKind::Robot: {
                robots_.push_back(std::make_unique<RobotApp>(u.rnti, cfg_.robot));
                robot_by_rnti_[u.rnti] = robots_.back().get();
                schedule_robot_tick(*robots_.back(), SimTime{});
                break;
            }
            case AppKind::Operator: {
                operators_.push_back(std::make_unique<OperatorApp>(OperatorApp{
                    u.rnti,
                    apps::EventSource(cfg_.operator_app, RngStream(cfg_.seed, "operator/" + std::to_string(u.rnti))),
                    {}, {}, 0, 0, 0}));
                operator_by_rnti_[u.rnti] = operators_.back().get();
                schedule_operator(*operators_.back());
                break;
            }
            case AppKind::Video: {
                videos_.push_back(std::make_unique<VideoApp>(
                    VideoApp{u.rnti, apps::VideoServer(cfg_.video), apps::VideoSession::start(cfg_.video), 0, {}, {}}));
                video_by_rnti_[u.rnti] = videos_.back().get();
                schedule_video_segment(*videos_.back(), SimTime{});
                break;
            }
            case AppKind::None: break;
        }
    }
    for (const auto& a : cfg_.timeline) {
        events_.schedule(from_seconds(a.t_s), EventClass::TimelineAction, [this, a] { on_timeline(a); });
    }
    if (total_ttis_ > 0) {
        events_.schedule(SimTime{}, EventClass::TtiBoundary, [this] { on_tti(0); });
    }
}

Engine::~Engine() = default;

void Engine::schedule_robot_tick(RobotApp& app, SimTime at) {
    events_.schedule(at, EventClass::AppTimer, [this, &app, at] {
        const auto fb = app.loop.robot_tick(at);
        enqueue(app.rnti, radio::Direction::Uplink, kFeedbackFlow, cfg_.robot.message_bytes,
                to_vector(apps::encode(fb)), at);
        schedule_robot_tick(app, at + cfg_.robot.control_period);
    });
}

void Engine::schedule_operator(OperatorApp& app) {
    const auto next = app.source.next_emission();
    if (!next) return;
    events_.schedule(*next, EventClass::AppTimer, [this, &app, at = *next] {
        for (const auto& cmd : app.source.step(at)) {
            ++app.emitted;
            app.in_flight[cmd.seq] = cmd;
            enqueue(app.rnti, radio::Direction::Uplink, kOperatorFlow, cfg_.operator_app.command_size_bytes,
                    apps::encode(cmd, cfg_.operator_app.command_size_bytes), at);
        }
        schedule_operator(app);
    });
}

void Engine::schedule_video_segment(VideoApp& app, SimTime at) {
    events_.schedule(at, EventClass::AppTimer, [this, &app, at] {
        for (auto size : app.server.next_segment()) {
            enqueue(app.rnti, radio::Direction::Downlink, kVideoFlow, size, {}, at);
        }
        schedule_video_segment(app, at + app.server.interval());
    });
}

void Engine::enqueue(Rnti rnti, radio::Direction dir, std::uint32_t flow, std::int64_t size,
                     std::vector<std::byte> payload, SimTime now) {
    radio::Packet p;
    p.rnti = rnti;
    p.direction = dir;
    p.flow = flow;
    p.size_bytes = size;
    p.enqueued_at = now;
    p.payload = std::move(payload);
    transport_.enqueue(std::move(p), agent_->ues());
}

void Engine::on_timeline(const TimelineAction& a) {
    const auto tti = next_tti_;
    control::ControlMessage m;
    try {
        switch (a.kind) {
            case TimelineAction::Kind::RelocateUe: m = control::UeRelocation{a.rnti, a.slice_id}; break;
            case TimelineAction::Kind::UpdateSlice: {
                const auto reg = plane_->registry();
                const auto* cur = reg.find(a.slice_id);
                if (!cur) {
                    throw control::ControlError(control::ErrorCode::UnknownSliceId,
                                                "no slice " + std::to_string(a.slice_id));
                }
                m = control::SliceCommand::update(control::merge_patch(*cur, a.patch));
                break;
            }
            case TimelineAction::Kind::EnableAutoscale: {
                auto p = cfg_.autoscale;
                p.enabled = true;
                plane_->set_autoscale(p);
                return;
            }
        }
        plane_->submit_internal(m, "timeline");
    } catch (const control::ControlError& e) {
        timeline_rejections_.push_back({tti, "timeline", control::to_json(m), e.what()});
    }
}

void Engine::on_tti(std::uint64_t k) {
    if (stop_requested_ || (stop_at_ && k >= *stop_at_)) {
        stopped_at_ = k;
        finished_ = true;
        return;
    }
    const SimTime now = k * cfg_.cell.tti;
    const double dt = to_seconds(cfg_.cell.tti);
    if (k > 0) close_tti_record(k - 1);
    if (k > 0 && k % period_ttis_ == 0) {
        publish_stats(now - static_cast<std::int64_t>(period_ttis_) * cfg_.cell.tti, now, k);
    }

    control::southbound_exchange(*plane_, *agent_, k);
    auto& ues = agent_->ues();
    transport_.release_retransmissions(k, ues);

    std::vector<radio::UeContext> demand;
    if (hooks_.on_tti) demand = ues;
    const auto& slices = agent_->slices();
    const auto dl = radio::allocate_tti(agent_->cell(), slices, ues, agent_->scheduler(), k,
                                        radio::Direction::Downlink, agent_->options());
    const auto ul = radio::allocate_tti(agent_->cell(), slices, ues, agent_->scheduler(), k,
                                        radio::Direction::Uplink, agent_->options());
    for (const auto* alloc : {&dl, &ul}) {
        for (auto& d : transport_.transport_step(*alloc, ues, now)) {
            events_.schedule(d.delivered_at, EventClass::AppTimer,
                             [this, pkt = std::move(d)] { on_delivery(pkt); });
        }
    }

    // Telemetry for this TTI; deliveries are added as they arrive.
    control::TtiRecord rec;
    rec.tti = k;
    rec.start = now;
    for (const auto& s : slices) {
        control::SliceTtiRecord sr;
        sr.slice_id = s.slice_id;
        for (const auto* alloc : {&dl, &ul}) {
            const int d = control::idx(alloc->direction);
            auto q = alloc->quotas.find(s.slice_id);
            sr.quota_prbs[d] = q == alloc->quotas.end() ? 0 : q->second;
            for (const auto& g : alloc->grants) sr.granted_prbs[d] += g.slice_id == s.slice_id;
            granted_prbs_[s.slice_id][d] += sr.granted_prbs[d];
            configured_ppm_[s.slice_id][d] += s.share(alloc->direction).ppm();
        }
        rec.slices.push_back(sr);
    }
    open_record_ = std::move(rec);

    for (auto& v : videos_) {
        const auto before = v->session.state;
        v->session = apps::video_step(v->session, v->pending_bytes, dt);
        v->pending_bytes = 0;
        const auto after = v->session.state;
        const double t = to_seconds(now) + dt;
        if (after == apps::PlayoutState::Playing && !v->playback_start) v->playback_start = t;
        if (before == apps::PlayoutState::Playing && after == apps::PlayoutState::Stalled) {
            v->stalls.push_back({t, std::nullopt});
        }
        if (before == apps::PlayoutState::Stalled && after == apps::PlayoutState::Playing) {
            v->stalls.back().end = t;
        }
    }

    audit(k, dl, ul);
    ++ttis_run_;
    if (hooks_.on_tti) hooks_.on_tti(TtiTrace{k, now, demand, slices, dl, ul});

    next_tti_ = k + 1;
    if (next_tti_ < total_ttis_) {
        events_.schedule(next_tti_ * cfg_.cell.tti, EventClass::TtiBoundary, [this, n = next_tti_] { on_tti(n); });
    }
}

void Engine::close_tti_record(std::uint64_t k) {
    if (!open_record_ || open_record_->tti != k) return;
    for (const auto& ue : agent_->ues()) {
        control::UeTtiRecord u;
        u.rnti = ue.rnti;
        u.slice_id = ue.slice_id;
        u.queue_bytes = {ue.dl_queue_bytes, ue.ul_queue_bytes};
        if (auto it = delivered_bits_.find(ue.rnti); it != delivered_bits_.end()) u.delivered_bits = it->second;
        open_record_->ues.push_back(u);
    }
    delivered_bits_.clear();
    telemetry_.push(std::move(*open_record_));
    open_record_.reset();
}

void Engine::publish_stats(SimTime from, SimTime to, std::uint64_t tti) {
    auto report = control::report_stats(telemetry_, from, to);
    period_reports_.push_back(report);
    last_report_tti_ = tti;
    plane_->publish(report, agent_->ues(), tti);
}

void Engine::on_delivery(const radio::DeliveredPacket& d) {
    const auto& p = d.packet;
    delivered_bits_[p.rnti][control::idx(p.direction)] += p.size_bytes * 8;
    if (hooks_.on_delivery) hooks_.on_delivery(d);
    const SimTime now = d.delivered_at;
    switch (p.flow) {
        case kFeedbackFlow: {
            auto* app = robot_by_rnti_.at(p.rnti);
            if (auto cmd = app->loop.controller_receive(apps::decode_feedback(p.payload), now)) {
                enqueue(p.rnti, radio::Direction::Downlink, kCommandFlow, cfg_.robot.message_bytes,
                        to_vector(apps::encode(*cmd)), now);
            }
            break;
        }
        case kCommandFlow:
            robot_by_rnti_.at(p.rnti)->loop.robot_receive(apps::decode_command(p.payload), now);
            break;
        case kOperatorFlow: {
            auto* app = operator_by_rnti_.at(p.rnti);
            const auto cmd = apps::decode_operator_command(p.payload);
            const auto rec = apps::event_latency_record(cmd, now, cfg_.operator_app.deadline);
            app->in_flight.erase(cmd.seq);
            app->latency_ms.push_back(to_millis(rec.latency));
            ++app->delivered;
            app->met += rec.deadline_met;
            break;
        }
        case kVideoFlow: video_by_rnti_.at(p.rnti)->pending_bytes += p.size_bytes; break;
        default: break;
    }
}

void Engine::audit(std::uint64_t k, const radio::TtiAllocation& dl, const radio::TtiAllocation& ul) {
    std::vector<std::string> problems;
    const auto& ues = agent_->ues();
    for (const auto* alloc : {&dl, &ul}) {
        const auto dir = radio::to_string(alloc->direction);
        std::set<int> used;
        for (const auto& g : alloc->grants) {
            if (g.prb_index < 0 || g.prb_index >= agent_->cell().prb_count) {
                problems.push_back(std::string(dir) + " PRB " + std::to_string(g.prb_index) + " outside the grid");
            }
            if (!used.insert(g.prb_index).second) {
                problems.push_back(std::string(dir) + " PRB " + std::to_string(g.prb_index) + " granted twice");
            }
            const auto* ue = radio::find_ue(std::span<const radio::UeContext>(ues), g.rnti);
            if (!ue || ue->slice_id != g.slice_id) {
                problems.push_back(std::string(dir) + " PRB " + std::to_string(g.prb_index) + " served rnti " +
                                   std::to_string(g.rnti) + " outside its slice");
            }
        }
    }
    for (const auto& ue : ues) {
        for (auto d : radio::kDirections) {
            const auto acct = transport_.accounting(ue.rnti, d);
            if (!acct.conserved() || acct.queued != ue.queue_bytes(d) || acct.queued < 0) {
                problems.push_back("rnti " + std::to_string(ue.rnti) + " " + std::string(radio::to_string(d)) +
                                   " queue accounting broken");
            }
        }
    }
    if (problems.empty()) return;
    std::ostringstream out;
    out << "audit failed at tti " << k << " (t=" << to_seconds(k * cfg_.cell.tti) << " s):";
    for (const auto& p : problems) out << "\n  " << p;
    throw InvariantViolation(out.str());
}

void Engine::step_until(std::uint64_t tti_end) {
    const auto limit = std::min(tti_end, total_ttis_);
    const SimTime horizon = static_cast<std::int64_t>(limit) * cfg_.cell.tti;
    while (!finished_ && !events_.empty() && events_.next_time() < horizon) events_.pop().fire();
    if (limit == total_ttis_) finished_ = true;
}

Report Engine::run() {
    step_until(total_ttis_);
    return finish();
}

Report Engine::finish() {
    if (!finished_) throw std::logic_error("finish() before the run completed");
    const std::uint64_t end_tti = stopped_at_ ? *stopped_at_ : total_ttis_;
    const SimTime end = static_cast<std::int64_t>(end_tti) * cfg_.cell.tti;
    if (!closed_) {
        closed_ = true;
        if (end_tti > 0) close_tti_record(end_tti - 1);
        if (end_tti > last_report_tti_) {
            publish_stats(static_cast<std::int64_t>(last_report_tti_) * cfg_.cell.tti, end, end_tti);
        }
        for (auto& r : robots_) r->loop.robot().advance_to(end);
    }

    Report rep;
    rep.config = to_json(cfg_);
    rep.duration_s = to_seconds(end);
    rep.stats_period_s = cfg_.stats_period_s;
    rep.ttis = ttis_run_;
    rep.stopped_at_tti = stopped_at_;

    for (const auto& pr : period_reports_) {
        for (const auto& u : pr.ues) {
            rep.throughput.push_back(
                {pr.window_end, u.rnti, u.slice_id, u.dl_throughput_bps() / 1e6, u.ul_throughput_bps() / 1e6});
        }
    }

    for (const auto& r : robots_) {
        RobotReport rr;
        rr.rnti = r->rnti;
        for (auto s : r->loop.rtt_samples()) rr.rtt_ms.push_back(to_millis(s));
        rr.rtt = percentiles(rr.rtt_ms);
        for (const auto& s : r->loop.cross_track()) rr.cross_track.push_back({to_seconds(s.t), s.error});
        rr.settle_time_s = cfg_.robot.settle_time_s;
        rr.cross_track_rms_m = apps::cross_track_rms(r->loop.cross_track(), from_seconds(cfg_.robot.settle_time_s));
        rep.robots.push_back(std::move(rr));
    }

    for (const auto& o : operators_) {
        OperatorReport orep;
        orep.rnti = o->rnti;
        orep.latency_ms = o->latency_ms;
        orep.emitted = o->emitted;
        orep.delivered = o->delivered;
        orep.deadline_met = o->met;
        std::int64_t overdue = 0;
        for (const auto& [seq, cmd] : o->in_flight) overdue += cmd.created + cfg_.operator_app.deadline <= end;
        orep.due = o->delivered + overdue;
        orep.deadline_met_fraction = orep.due == 0 ? 1.0 : static_cast<double>(o->met) / static_cast<double>(orep.due);
        rep.operators.push_back(std::move(orep));
    }

    for (const auto& v : videos_) {
        VideoReport vr;
        vr.rnti = v->rnti;
        vr.bitrate_bps = cfg_.video.bitrate_bps;
        vr.delivered_bytes = v->session.delivered_bytes;
        vr.goodput_bps = rep.duration_s > 0 ? static_cast<double>(vr.delivered_bytes) * 8.0 / rep.duration_s : 0.0;
        vr.stall_count = v->session.stall_count;
        vr.total_stall_duration_s = v->session.total_stall_duration_s;
        vr.playback_start_s = v->playback_start;
        vr.stalls = v->stalls;
        rep.videos.push_back(std::move(vr));
    }

    const double grid = static_cast<double>(ttis_run_) * cfg_.cell.prb_count;
    for (const auto& [id, ppm] : configured_ppm_) {
        SliceShareReport s;
        s.slice_id = id;
        for (int d = 0; d < 2; ++d) {
            s.configured[d] = ttis_run_ == 0 ? 0.0 : static_cast<double>(ppm[d]) / 1e6 / static_cast<double>(ttis_run_);
            s.realized[d] = grid == 0 ? 0.0 : static_cast<double>(granted_prbs_[id][d]) / grid;
        }
        rep.slice_shares.push_back(s);
    }

    rep.rejected_commands = plane_->rejected();
    rep.rejected_commands.insert(rep.rejected_commands.end(), timeline_rejections_.begin(), timeline_rejections_.end());
    rep.commands = plane_->command_log();
    return rep;
}

Report run_scenario(const ScenarioConfig& cfg, EngineHooks hooks) {
    Engine e(cfg, std::move(hooks));
    return e.run();
}

}  // namespace slicesim::sim
