#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slicesim/radio/types.hpp"

namespace slicesim::radio {

using SliceId = std::int32_t;
using Rnti = std::uint16_t;

/// Slice id used for the implicit shared pool when slicing is disabled.
inline constexpr SliceId kUnslicedId = 0;

struct SliceDescriptor {
    SliceId slice_id = 0;
    std::string label;
    Share dl_share;
    Share ul_share;
    int priority = 0;  // larger is more important
    RbAvailability rb_availability = RbAvailability::Low;

    Share share(Direction d) const { return d == Direction::Downlink ? dl_share : ul_share; }

    bool operator==(const SliceDescriptor&) const = default;
};

/// Settlement order: High availability first, then descending priority, then
/// ascending id.
bool settles_before(const SliceDescriptor& a, const SliceDescriptor& b);

/// Returns the slices sorted into settlement order.
std::vector<const SliceDescriptor*> settlement_order(std::span<const SliceDescriptor> slices);

struct UeContext {
    Rnti rnti = 0;
    std::string imsi;
    SliceId slice_id = kUnslicedId;
    int cqi_dl = 15;
    int cqi_ul = 15;
    std::int64_t dl_queue_bytes = 0;
    std::int64_t ul_queue_bytes = 0;
    bool control_priority = false;  // consulted only by the priority-class policy

    int cqi(Direction d) const { return d == Direction::Downlink ? cqi_dl : cqi_ul; }
    std::int64_t& queue_bytes(Direction d) {
        return d == Direction::Downlink ? dl_queue_bytes : ul_queue_bytes;
    }
    std::int64_t queue_bytes(Direction d) const {
        return d == Direction::Downlink ? dl_queue_bytes : ul_queue_bytes;
    }
};

const SliceDescriptor* find_slice(std::span<const SliceDescriptor> slices, SliceId id);
UeContext* find_ue(std::span<UeContext> ues, Rnti rnti);
const UeContext* find_ue(std::span<const UeContext> ues, Rnti rnti);

}  // namespace slicesim::radio
