#include "slicesim/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "slicesim/common/error.hpp"
#include "slicesim/control/codec.hpp"
#include "slicesim/control/registry.hpp"
#include "slicesim/sim/presets.hpp"

namespace slicesim::sim {

std::string_view to_string(AppKind a) {
    switch (a) {
        case AppKind::None: return "none";
        case AppKind::Robot: return "robot";
        case AppKind::Operator: return "operator";
        case AppKind::Video: return "video";
    }
    return "?";
}

std::string_view to_string(Mode m) { return m == Mode::Baseline ? "baseline" : "sliced"; }

namespace {

/// Field access on one JSON object that remembers which keys were read, so
/// leftovers can be reported as unknown.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json& raw(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(where_ + "." + key + " is required");
        return j_.at(key);
    }

    template <typename T>
    T req(const char* key) {
        const auto& v = raw(key);
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + " has the wrong type");
        }
    }

    template <typename T>
    T opt(const char* key, T fallback) {
        return has(key) ? req<T>(key) : fallback;
    }

    std::string path(const char* key) const { return where_ + "." + key; }

    void done() const {
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.contains(k)) throw ConfigError("unknown field " + where_ + "." + k);
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

SimTime seconds_field(Fields& f, const char* key, SimTime fallback) {
    return f.has(key) ? from_seconds(f.req<double>(key)) : fallback;
}

apps::Vec2 vec_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + " must be [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec_json(apps::Vec2 v) { return json::array({v.x, v.y}); }

std::string_view to_string(apps::PathKind k) {
    switch (k) {
        case apps::PathKind::StraightLine: return "straight_line";
        case apps::PathKind::Circle: return "circle";
        case apps::PathKind::Waypoints: return "waypoints";
    }
    return "?";
}

apps::PathSpec path_from(const json& j) {
    Fields f(j, "robot.path");
    apps::PathSpec p;
    const auto kind = f.req<std::string>("kind");
    if (kind == "straight_line") {
        p.kind = apps::PathKind::StraightLine;
        if (f.has("origin")) p.origin = vec_from(f.raw("origin"), f.path("origin"));
        if (f.has("direction")) p.direction = vec_from(f.raw("direction"), f.path("direction"));
    } else if (kind == "circle") {
        p.kind = apps::PathKind::Circle;
        if (f.has("center")) p.center = vec_from(f.raw("center"), f.path("center"));
        p.radius = f.opt("radius", p.radius);
        p.clockwise = f.opt("clockwise", p.clockwise);
    } else if (kind == "waypoints") {
        p.kind = apps::PathKind::Waypoints;
        const auto& pts = f.raw("points");
        if (!pts.is_array()) throw ConfigError("robot.path.points must be an array");
        for (const auto& pt : pts) p.waypoints.push_back(vec_from(pt, "robot.path.points[]"));
        p.loop = f.opt("loop", p.loop);
    } else {
        throw ConfigError("robot.path.kind must be straight_line, circle or waypoints");
    }
    p.cruise_speed = f.opt("cruise_speed", p.cruise_speed);
    f.done();
    return p;
}

json path_json(const apps::PathSpec& p) {
    json j{{"kind", to_string(p.kind)}, {"cruise_speed", p.cruise_speed}};
    switch (p.kind) {
        case apps::PathKind::StraightLine:
            j["origin"] = vec_json(p.origin);
            j["direction"] = vec_json(p.direction);
            break;
        case apps::PathKind::Circle:
            j["center"] = vec_json(p.center);
            j["radius"] = p.radius;
            j["clockwise"] = p.clockwise;
            break;
        case apps::PathKind::Waypoints: {
            json pts = json::array();
            for (auto v : p.waypoints) pts.push_back(vec_json(v));
            j["points"] = pts;
            j["loop"] = p.loop;
            break;
        }
    }
    return j;
}

apps::RobotAppConfig robot_from(const json& j) {
    Fields f(j, "robot");
    apps::RobotAppConfig r;
    r.geometry.wheel_radius = f.opt("wheel_radius", r.geometry.wheel_radius);
    r.geometry.axle_length = f.opt("axle_length", r.geometry.axle_length);
    r.geometry.ticks_per_rev = f.opt("ticks_per_rev", r.geometry.ticks_per_rev);
    r.control_period = seconds_field(f, "control_period_s", r.control_period);
    r.physics_dt = seconds_field(f, "physics_dt_s", r.physics_dt);
    r.message_bytes = f.opt("message_bytes", r.message_bytes);
    r.settle_time_s = f.opt("settle_time_s", r.settle_time_s);
    if (f.has("path")) r.path = path_from(f.raw("path"));
    if (f.has("gains")) {
        Fields g(f.raw("gains"), "robot.gains");
        r.gains.k_cross_track = g.opt("k_cross_track", r.gains.k_cross_track);
        r.gains.k_heading = g.opt("k_heading", r.gains.k_heading);
        r.gains.omega_max = g.opt("omega_max", r.gains.omega_max);
        g.done();
    }
    if (f.has("initial_pose")) {
        Fields p(f.raw("initial_pose"), "robot.initial_pose");
        r.initial_pose.x = p.opt("x", 0.0);
        r.initial_pose.y = p.opt("y", 0.0);
        r.initial_pose.theta = p.opt("theta", 0.0);
        p.done();
    }
    f.done();
    return r;
}

json robot_json(const apps::RobotAppConfig& r) {
    return {{"wheel_radius", r.geometry.wheel_radius},
            {"axle_length", r.geometry.axle_length},
            {"ticks_per_rev", r.geometry.ticks_per_rev},
            {"control_period_s", to_seconds(r.control_period)},
            {"physics_dt_s", to_seconds(r.physics_dt)},
            {"message_bytes", r.message_bytes},
            {"settle_time_s", r.settle_time_s},
            {"path", path_json(r.path)},
            {"gains",
             {{"k_cross_track", r.gains.k_cross_track},
              {"k_heading", r.gains.k_heading},
              {"omega_max", r.gains.omega_max}}},
            {"initial_pose",
             {{"x", r.initial_pose.x}, {"y", r.initial_pose.y}, {"theta", r.initial_pose.theta}}}};
}

apps::EventSourceConfig operator_from(const json& j) {
    Fields f(j, "operator");
    apps::EventSourceConfig e;
    const auto mode = f.opt<std::string>("mode", "poisson");
    if (mode == "poisson") {
        e.mode = apps::EventSourceConfig::Mode::Poisson;
    } else if (mode == "scripted") {
        e.mode = apps::EventSourceConfig::Mode::Scripted;
    } else {
        throw ConfigError("operator.mode must be poisson or scripted");
    }
    e.rate_hz = f.opt("rate_hz", e.rate_hz);
    e.times_s = f.opt("times_s", e.times_s);
    e.command_size_bytes = f.opt("command_size_bytes", e.command_size_bytes);
    e.deadline = seconds_field(f, "deadline_s", e.deadline);
    f.done();
    return e;
}

json operator_json(const apps::EventSourceConfig& e) {
    return {{"mode", e.mode == apps::EventSourceConfig::Mode::Poisson ? "poisson" : "scripted"},
            {"rate_hz", e.rate_hz},
            {"times_s", e.times_s},
            {"command_size_bytes", e.command_size_bytes},
            {"deadline_s", to_seconds(e.deadline)}};
}

apps::VideoConfig video_from(const json& j) {
    Fields f(j, "video");
    apps::VideoConfig v;
    v.bitrate_bps = f.opt("bitrate_bps", v.bitrate_bps);
    v.segment_size_bytes = f.opt("segment_size_bytes", v.segment_size_bytes);
    v.packet_size_bytes = f.opt("packet_size_bytes", v.packet_size_bytes);
    v.initial_buffer_s = f.opt("initial_buffer_s", v.initial_buffer_s);
    v.rebuffer_resume_s = f.opt("rebuffer_resume_s", v.rebuffer_resume_s);
    f.done();
    return v;
}

json video_json(const apps::VideoConfig& v) {
    return {{"bitrate_bps", v.bitrate_bps},
            {"segment_size_bytes", v.segment_size_bytes},
            {"packet_size_bytes", v.packet_size_bytes},
            {"initial_buffer_s", v.initial_buffer_s},
            {"rebuffer_resume_s", v.rebuffer_resume_s}};
}

control::AutoscalePolicy autoscale_from(const json& j) {
    Fields f(j, "autoscale");
    control::AutoscalePolicy p;
    p.enabled = f.opt("enabled", p.enabled);
    p.high_watermark = f.opt("high_watermark", p.high_watermark);
    p.low_watermark = f.opt("low_watermark", p.low_watermark);
    p.step = f.opt("step", p.step);
    p.min_share = f.opt("min_share", p.min_share);
    p.evaluation_period = seconds_field(f, "evaluation_period_s", p.evaluation_period);
    p.cooldown = seconds_field(f, "cooldown_s", p.cooldown);
    f.done();
    return p;
}

json autoscale_json(const control::AutoscalePolicy& p) {
    return {{"enabled", p.enabled},
            {"high_watermark", p.high_watermark},
            {"low_watermark", p.low_watermark},
            {"step", p.step},
            {"min_share", p.min_share},
            {"evaluation_period_s", to_seconds(p.evaluation_period)},
            {"cooldown_s", to_seconds(p.cooldown)}};
}

radio::CellConfig cell_from(const json& j, std::string& preset) {
    if (j.is_string()) {
        preset = j.get<std::string>();
        auto c = radio::numerology_preset(preset);
        if (!c) throw ConfigError("unknown cell preset " + preset + " (lte10, nr80)");
        return *c;
    }
    preset.clear();
    Fields f(j, "cell");
    const auto bw = f.req<std::int64_t>("bandwidth_hz");
    const auto scs = f.req<std::int64_t>("subcarrier_spacing_hz");
    std::optional<int> prbs;
    if (f.has("prb_count")) prbs = f.req<int>("prb_count");
    const auto tti = seconds_field(f, "tti_s", std::chrono::milliseconds(1));
    radio::CqiTable table = radio::default_cqi_table();
    if (f.has("cqi_table")) {
        const auto v = f.req<std::vector<std::int64_t>>("cqi_table");
        if (v.size() != table.size()) throw ConfigError("cell.cqi_table needs 15 entries");
        std::ranges::copy(v, table.begin());
    }
    f.done();
    return radio::make_cell(bw, scs, prbs, tti, table);
}

json cell_json(const ScenarioConfig& c) {
    if (!c.cell_preset.empty()) return c.cell_preset;
    return {{"bandwidth_hz", c.cell.bandwidth_hz},
            {"subcarrier_spacing_hz", c.cell.subcarrier_spacing_hz},
            {"prb_count", c.cell.prb_count},
            {"tti_s", to_seconds(c.cell.tti)},
            {"cqi_table", c.cell.bits_per_prb}};
}

radio::SliceDescriptor slice_from(const json& j) {
    try {
        Fields f(j, "slices[]");
        for (const char* k : {"slice_id", "label", "share", "dl_share", "ul_share", "priority", "rb_availability"}) {
            if (f.has(k)) f.raw(k);
        }
        f.done();
        return control::descriptor_from_json(j);
    } catch (const control::ControlError& e) {
        throw ConfigError(std::string("slices[]: ") + e.what());
    }
}

std::string_view to_string(TimelineAction::Kind k) {
    switch (k) {
        case TimelineAction::Kind::RelocateUe: return "relocate_ue";
        case TimelineAction::Kind::UpdateSlice: return "update_slice";
        case TimelineAction::Kind::EnableAutoscale: return "enable_autoscale";
    }
    return "?";
}

TimelineAction action_from(const json& j) {
    Fields f(j, "timeline[]");
    TimelineAction a;
    a.t_s = f.req<double>("t");
    const auto kind = f.req<std::string>("action");
    if (kind == "relocate_ue") {
        a.kind = TimelineAction::Kind::RelocateUe;
        a.rnti = f.req<Rnti>("rnti");
        a.slice_id = f.req<SliceId>("slice_id");
        f.done();
    } else if (kind == "update_slice") {
        a.kind = TimelineAction::Kind::UpdateSlice;
        a.slice_id = f.req<SliceId>("slice_id");
        a.patch = json::object();
        for (const auto& [k, v] : j.items()) {
            if (k != "t" && k != "action" && k != "slice_id") a.patch[k] = v;
        }
    } else if (kind == "enable_autoscale") {
        a.kind = TimelineAction::Kind::EnableAutoscale;
        f.done();
    } else {
        throw ConfigError("timeline action must be relocate_ue, update_slice or enable_autoscale");
    }
    return a;
}

json action_json(const TimelineAction& a) {
    json j{{"t", a.t_s}, {"action", to_string(a.kind)}};
    switch (a.kind) {
        case TimelineAction::Kind::RelocateUe:
            j["rnti"] = a.rnti;
            j["slice_id"] = a.slice_id;
            break;
        case TimelineAction::Kind::UpdateSlice:
            j.update(a.patch);
            j["slice_id"] = a.slice_id;
            break;
        case TimelineAction::Kind::EnableAutoscale: break;
    }
    return j;
}

UeSpec ue_from(const json& j) {
    Fields f(j, "ues[]");
    UeSpec u;
    u.rnti = f.req<Rnti>("rnti");
    u.imsi = f.opt<std::string>("imsi", "");
    const auto app = f.opt<std::string>("app", "none");
    if (app == "robot") {
        u.app = AppKind::Robot;
    } else if (app == "operator") {
        u.app = AppKind::Operator;
    } else if (app == "video") {
        u.app = AppKind::Video;
    } else if (app == "none") {
        u.app = AppKind::None;
    } else {
        throw ConfigError("ues[].app must be robot, operator, video or none");
    }
    u.slice_id = f.opt("slice_id", u.slice_id);
    u.cqi_dl = f.opt("cqi_dl", u.cqi_dl);
    u.cqi_ul = f.opt("cqi_ul", u.cqi_ul);
    u.control_priority = f.opt("control_priority", u.control_priority);
    f.done();
    return u;
}

json ue_json(const UeSpec& u) {
    return {{"rnti", u.rnti},       {"imsi", u.imsi},     {"app", to_string(u.app)},
            {"slice_id", u.slice_id}, {"cqi_dl", u.cqi_dl}, {"cqi_ul", u.cqi_ul},
            {"control_priority", u.control_priority}};
}

bool whole_ttis(double seconds, SimTime tti) {
    const auto t = from_seconds(seconds);
    return t.count() % tti.count() == 0;
}

}  // namespace

radio::IntraSlicePolicy ScenarioConfig::policy() const {
    if (intra_slice_policy) return *intra_slice_policy;
    return mode == Mode::Baseline ? radio::IntraSlicePolicy::PriorityClasses : radio::IntraSlicePolicy::RoundRobin;
}

radio::AllocationOptions ScenarioConfig::allocation_options() const {
    return {mode == Mode::Sliced && reoffer_idle_prbs, policy()};
}

std::uint64_t ScenarioConfig::total_ttis() const {
    return static_cast<std::uint64_t>(from_seconds(duration_s) / cell.tti);
}

std::uint64_t ScenarioConfig::stats_period_ttis() const {
    return static_cast<std::uint64_t>(from_seconds(stats_period_s) / cell.tti);
}

void ScenarioConfig::validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
    if (!(stats_period_s > 0.0)) throw ConfigError("stats_period_s must be positive");
    if (!whole_ttis(duration_s, cell.tti)) throw ConfigError("duration_s must be a whole number of TTIs");
    if (!whole_ttis(stats_period_s, cell.tti) || stats_period_ttis() == 0) {
        throw ConfigError("stats_period_s must be a whole, non-zero number of TTIs");
    }
    if (!(link.loss_p >= 0.0 && link.loss_p < 1.0)) throw ConfigError("link.loss_p must lie in [0, 1)");
    if (link.processing_delay < SimTime{}) throw ConfigError("link.processing_delay_s must not be negative");
    if (link.retransmit_delay_ttis < 1) throw ConfigError("link.retransmit_delay_ttis must be at least 1");
    autoscale.validate();
    robot.validate();
    operator_app.validate();
    video.validate();

    std::set<Rnti> rntis;
    for (const auto& u : ues) {
        if (u.rnti == 0) throw ConfigError("rnti 0 is reserved");
        if (!rntis.insert(u.rnti).second) throw ConfigError("duplicate rnti " + std::to_string(u.rnti));
        for (int cqi : {u.cqi_dl, u.cqi_ul}) {
            if (cqi < radio::kMinCqi || cqi > radio::kMaxCqi) {
                throw ConfigError("rnti " + std::to_string(u.rnti) + ": cqi must lie in 1..15");
            }
        }
    }

    for (const auto& a : timeline) {
        if (!(a.t_s >= 0.0 && a.t_s <= duration_s)) throw ConfigError("timeline time outside [0, duration_s]");
    }

    if (mode == Mode::Baseline) {
        if (!slices.empty()) throw ConfigError("baseline mode does not take slice definitions");
        if (!(baseline_pool_share > 0.0 && baseline_pool_share <= 1.0)) {
            throw ConfigError("baseline_pool_share must lie in (0, 1]");
        }
        for (const auto& u : ues) {
            if (u.slice_id != radio::kUnslicedId) throw ConfigError("baseline mode UEs cannot name a slice");
        }
        if (!timeline.empty()) throw ConfigError("baseline mode has no slice timeline");
        if (autoscale.enabled) throw ConfigError("baseline mode cannot autoscale");
        return;
    }

    // Replay the slice set and timeline on a scratch registry.
    control::SliceRegistry reg;
    try {
        for (const auto& s : slices) reg.apply(control::SliceCommand::create(s));
        for (const auto& u : ues) reg.attach(u.rnti, u.slice_id);
        auto ordered = timeline;
        std::ranges::stable_sort(ordered, {}, &TimelineAction::t_s);
        for (const auto& a : ordered) {
            if (a.kind == TimelineAction::Kind::RelocateUe) {
                reg.apply(control::UeRelocation{a.rnti, a.slice_id});
            } else if (a.kind == TimelineAction::Kind::UpdateSlice) {
                const auto* cur = reg.find(a.slice_id);
                if (!cur) throw control::ControlError(control::ErrorCode::UnknownSliceId,
                                                      "no slice " + std::to_string(a.slice_id));
                reg.apply(control::SliceCommand::update(control::merge_patch(*cur, a.patch)));
            }
        }
    } catch (const control::ControlError& e) {
        throw ConfigError(std::string(control::to_string(e.code())) + ": " + e.what());
    }
}

ScenarioConfig scenario_from_json(const json& j) {
    Fields f(j, "scenario");
    ScenarioConfig c;
    if (f.has("cell")) c.cell = cell_from(f.raw("cell"), c.cell_preset);
    const auto mode = f.opt<std::string>("mode", "sliced");
    if (mode == "baseline") {
        c.mode = Mode::Baseline;
    } else if (mode == "sliced") {
        c.mode = Mode::Sliced;
    } else {
        throw ConfigError("mode must be baseline or sliced");
    }
    c.baseline_pool_share = f.opt("baseline_pool_share", c.baseline_pool_share);
    if (f.has("intra_slice_policy")) {
        const auto p = f.req<std::string>("intra_slice_policy");
        if (p == "round_robin") {
            c.intra_slice_policy = radio::IntraSlicePolicy::RoundRobin;
        } else if (p == "priority_classes") {
            c.intra_slice_policy = radio::IntraSlicePolicy::PriorityClasses;
        } else {
            throw ConfigError("intra_slice_policy must be round_robin or priority_classes");
        }
    }
    c.reoffer_idle_prbs = f.opt("reoffer_idle_prbs", c.reoffer_idle_prbs);
    if (f.has("slices")) {
        const auto& arr = f.raw("slices");
        if (!arr.is_array()) throw ConfigError("slices must be an array");
        for (const auto& s : arr) c.slices.push_back(slice_from(s));
    }
    if (f.has("ues")) {
        const auto& arr = f.raw("ues");
        if (!arr.is_array()) throw ConfigError("ues must be an array");
        for (const auto& u : arr) c.ues.push_back(ue_from(u));
    }
    if (f.has("link")) {
        Fields l(f.raw("link"), "link");
        c.link.loss_p = l.opt("loss_p", c.link.loss_p);
        c.link.processing_delay = seconds_field(l, "processing_delay_s", c.link.processing_delay);
        c.link.retransmit_delay_ttis = l.opt("retransmit_delay_ttis", c.link.retransmit_delay_ttis);
        l.done();
    }
    if (f.has("timeline")) {
        const auto& arr = f.raw("timeline");
        if (!arr.is_array()) throw ConfigError("timeline must be an array");
        for (const auto& a : arr) c.timeline.push_back(action_from(a));
    }
    if (f.has("autoscale")) c.autoscale = autoscale_from(f.raw("autoscale"));
    c.stats_period_s = f.opt("stats_period_s", c.stats_period_s);
    c.duration_s = f.opt("duration_s", c.duration_s);
    c.seed = f.opt("seed", c.seed);
    if (f.has("robot")) c.robot = robot_from(f.raw("robot"));
    if (f.has("operator")) c.operator_app = operator_from(f.raw("operator"));
    if (f.has("video")) c.video = video_from(f.raw("video"));
    f.done();
    c.validate();
    return c;
}

json to_json(const ScenarioConfig& c) {
    json slices = json::array();
    for (const auto& s : c.slices) slices.push_back(control::to_json(s));
    json ues = json::array();
    for (const auto& u : c.ues) ues.push_back(ue_json(u));
    json timeline = json::array();
    for (const auto& a : c.timeline) timeline.push_back(action_json(a));
    return {{"cell", cell_json(c)},
            {"mode", to_string(c.mode)},
            {"baseline_pool_share", c.baseline_pool_share},
            {"intra_slice_policy",
             c.policy() == radio::IntraSlicePolicy::RoundRobin ? "round_robin" : "priority_classes"},
            {"reoffer_idle_prbs", c.reoffer_idle_prbs},
            {"slices", slices},
            {"ues", ues},
            {"link",
             {{"loss_p", c.link.loss_p},
              {"processing_delay_s", to_seconds(c.link.processing_delay)},
              {"retransmit_delay_ttis", c.link.retransmit_delay_ttis}}},
            {"timeline", timeline},
            {"autoscale", autoscale_json(c.autoscale)},
            {"stats_period_s", c.stats_period_s},
            {"duration_s", c.duration_s},
            {"seed", c.seed},
            {"robot", robot_json(c.robot)},
            {"operator", operator_json(c.operator_app)},
            {"video", video_json(c.video)}};
}

ScenarioConfig load_scenario(const std::string& source) {
    constexpr std::string_view prefix = "preset:";
    if (source.starts_with(prefix)) {
        const auto name = source.substr(prefix.size());
        auto p = find_preset(name);
        if (!p) throw ConfigError("unknown preset " + name);
        return *p;
    }
    std::ifstream in(source);
    if (!in) throw ConfigError("cannot read " + source);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace slicesim::sim
