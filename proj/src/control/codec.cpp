#include "slicesim/control/codec.hpp"

namespace slicesim::control {

namespace {

[[noreturn]] void bad(ErrorCode code, const std::string& what) { throw ControlError(code, what); }

radio::Share share_field(const json& body, const char* key) {
    const auto& v = body.at(key);
    if (!v.is_number()) bad(ErrorCode::InvalidDescriptor, std::string(key) + " must be a number");
    const double f = v.get<double>();
    if (!(f >= 0.0 && f <= 1.0)) bad(ErrorCode::InvalidDescriptor, std::string(key) + " must lie in [0, 1]");
    return radio::Share::from_fraction(f);
}

radio::RbAvailability availability_field(const json& v) {
    if (v == "high") return radio::RbAvailability::High;
    if (v == "low") return radio::RbAvailability::Low;
    bad(ErrorCode::InvalidDescriptor, "rb_availability must be \"high\" or \"low\"");
}

template <typename T>
T typed(const json& v, const char* key, ErrorCode code) {
    try {
        return v.at(key).get<T>();
    } catch (const json::exception&) {
        bad(code, std::string("missing or invalid field ") + key);
    }
}

void apply_fields(SliceDescriptor& d, const json& body) {
    if (!body.is_object()) bad(ErrorCode::InvalidDescriptor, "slice body must be an object");
    if (body.contains("label")) d.label = typed<std::string>(body, "label", ErrorCode::InvalidDescriptor);
    if (body.contains("share")) d.dl_share = d.ul_share = share_field(body, "share");
    if (body.contains("dl_share")) d.dl_share = share_field(body, "dl_share");
    if (body.contains("ul_share")) d.ul_share = share_field(body, "ul_share");
    if (body.contains("priority")) d.priority = typed<int>(body, "priority", ErrorCode::InvalidDescriptor);
    if (body.contains("rb_availability")) d.rb_availability = availability_field(body.at("rb_availability"));
}

}  // namespace

json to_json(const SliceDescriptor& d) {
    return {{"slice_id", d.slice_id},
            {"label", d.label},
            {"dl_share", d.dl_share.fraction()},
            {"ul_share", d.ul_share.fraction()},
            {"priority", d.priority},
            {"rb_availability", radio::to_string(d.rb_availability)}};
}

SliceDescriptor descriptor_from_json(const json& body) {
    if (!body.is_object()) bad(ErrorCode::InvalidDescriptor, "slice body must be an object");
    SliceDescriptor d;
    d.slice_id = typed<SliceId>(body, "slice_id", ErrorCode::InvalidDescriptor);
    if (!body.contains("share") && !(body.contains("dl_share") && body.contains("ul_share"))) {
        bad(ErrorCode::InvalidDescriptor, "share, or dl_share and ul_share, required");
    }
    apply_fields(d, body);
    return d;
}

SliceDescriptor merge_patch(SliceDescriptor current, const json& patch) {
    if (patch.is_object() && patch.contains("slice_id") &&
        patch.at("slice_id") != json(current.slice_id)) {
        bad(ErrorCode::InvalidDescriptor, "slice_id cannot be changed");
    }
    apply_fields(current, patch);
    return current;
}

json to_json(const ControlMessage& m) {
    if (const auto* r = std::get_if<UeRelocation>(&m)) {
        return {{"type", "relocate_ue"}, {"rnti", r->rnti}, {"slice_id", r->target_slice_id}};
    }
    const auto& c = std::get<SliceCommand>(m);
    switch (c.kind) {
        case SliceCommand::Kind::Create: {
            auto j = to_json(c.descriptor);
            j["type"] = "create_slice";
            return j;
        }
        case SliceCommand::Kind::Update: {
            auto j = to_json(c.descriptor);
            j["type"] = "update_slice";
            return j;
        }
        case SliceCommand::Kind::Delete: return {{"type", "delete_slice"}, {"slice_id", c.slice_id}};
    }
    return {};
}

ControlMessage message_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        bad(ErrorCode::BadRequest, "message needs a string \"type\"");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "create_slice") return SliceCommand::create(descriptor_from_json(j));
    if (type == "update_slice") return SliceCommand::update(descriptor_from_json(j));
    if (type == "delete_slice") return SliceCommand::remove(typed<SliceId>(j, "slice_id", ErrorCode::BadRequest));
    if (type == "relocate_ue") {
        return UeRelocation{typed<Rnti>(j, "rnti", ErrorCode::BadRequest),
                            typed<SliceId>(j, "slice_id", ErrorCode::BadRequest)};
    }
    bad(ErrorCode::BadRequest, "unknown message type " + type);
}

json to_json(const radio::UeContext& ue) {
    return {{"rnti", ue.rnti},
            {"imsi", ue.imsi},
            {"slice_id", ue.slice_id},
            {"cqi_dl", ue.cqi_dl},
            {"cqi_ul", ue.cqi_ul},
            {"dl_queue_bytes", ue.dl_queue_bytes},
            {"ul_queue_bytes", ue.ul_queue_bytes},
            {"control_priority", ue.control_priority}};
}

json to_json(const StatsReport& r) {
    json ues = json::array();
    for (const auto& u : r.ues) {
        ues.push_back({{"rnti", u.rnti},
                       {"slice_id", u.slice_id},
                       {"dl_throughput_bps", u.dl_throughput_bps()},
                       {"ul_throughput_bps", u.ul_throughput_bps()},
                       {"dl_queue_bytes", u.queue_bytes[0]},
                       {"ul_queue_bytes", u.queue_bytes[1]}});
    }
    json slices = json::array();
    for (const auto& s : r.slices) {
        slices.push_back({{"slice_id", s.slice_id},
                          {"util_dl", s.utilization(Direction::Downlink)},
                          {"util_ul", s.utilization(Direction::Uplink)},
                          {"quota_prbs_dl", s.quota_prbs[0]},
                          {"quota_prbs_ul", s.quota_prbs[1]},
                          {"granted_prbs_dl", s.granted_prbs[0]},
                          {"granted_prbs_ul", s.granted_prbs[1]}});
    }
    return {{"window_start", r.window_start}, {"window_end", r.window_end}, {"ues", ues}, {"slices", slices}};
}

json telemetry_frame(const StatsReport& r, std::span<const SliceDescriptor> slices) {
    json per_ue = json::array();
    for (const auto& u : r.ues) {
        per_ue.push_back({{"rnti", u.rnti},
                          {"slice_id", u.slice_id},
                          {"dl_mbps", u.dl_throughput_bps() / 1e6},
                          {"ul_mbps", u.ul_throughput_bps() / 1e6}});
    }
    json per_slice = json::array();
    for (const auto& d : slices) {
        const auto* s = r.slice(d.slice_id);
        per_slice.push_back({{"id", d.slice_id},
                             {"util_dl", s ? s->utilization(Direction::Downlink) : 0.0},
                             {"util_ul", s ? s->utilization(Direction::Uplink) : 0.0},
                             {"share_dl", d.dl_share.fraction()}});
    }
    return {{"t", r.window_end}, {"per_ue", per_ue}, {"per_slice", per_slice}};
}

}  // namespace slicesim::control
