#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "slicesim/control/registry.hpp"
#include "slicesim/control/stats.hpp"

namespace slicesim::control {

using nlohmann::json;

/// Descriptor body: {slice_id, label, dl_share, ul_share, priority,
/// rb_availability}. Shares are fractions of the grid. A plain "share" sets
/// both directions.
json to_json(const SliceDescriptor& d);

/// Throws ControlError(InvalidDescriptor) on missing or mistyped fields.
SliceDescriptor descriptor_from_json(const json& body);

/// Applies the fields present in `patch` on top of `current`. The slice id
/// cannot change.
SliceDescriptor merge_patch(SliceDescriptor current, const json& patch);

/// Southbound message: the northbound body plus a "type" field, one of
/// create_slice, update_slice, delete_slice or relocate_ue.
json to_json(const ControlMessage& m);
/// Throws ControlError(BadRequest) on an unknown type or malformed body.
ControlMessage message_from_json(const json& j);

json to_json(const radio::UeContext& ue);
json to_json(const StatsReport& r);

/// One telemetry frame: {t, per_ue: [{rnti, slice_id, dl_mbps, ul_mbps}],
/// per_slice: [{id, util_dl, util_ul, share_dl}]}.
json telemetry_frame(const StatsReport& r, std::span<const SliceDescriptor> slices);

}  // namespace slicesim::control
