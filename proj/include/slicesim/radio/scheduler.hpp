#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "slicesim/radio/cell_config.hpp"
#include "slicesim/radio/quota.hpp"
#include "slicesim/radio/slice.hpp"

namespace slicesim::radio {

/// How a slice picks among its own backlogged UEs.
enum class IntraSlicePolicy : std::uint8_t {
    /// Plain round-robin by ascending RNTI.
    RoundRobin,
    /// UEs with control_priority strictly before the rest; round-robin within
    /// each class.
    PriorityClasses,
};

struct AllocationOptions {
    /// Offer PRBs left idle after quota settlement to other backlogged slices.
    bool reoffer_idle_prbs = true;
    IntraSlicePolicy policy = IntraSlicePolicy::RoundRobin;
};

struct Grant {
    int prb_index = 0;
    SliceId slice_id = 0;
    Rnti rnti = 0;
    std::int64_t bits_served = 0;

    bool operator==(const Grant&) const = default;
};

struct TtiAllocation {
    std::uint64_t tti_index = 0;
    Direction direction = Direction::Downlink;
    std::vector<Grant> grants;
    QuotaMap quotas;

    bool operator==(const TtiAllocation&) const = default;
};

/// Scheduler state that persists across TTIs: deficit accounts plus the
/// round-robin cursor (last served RNTI) of every slice, class and direction.
class SchedulerState {
public:
    DeficitLedger& deficits() { return deficits_; }
    const DeficitLedger& deficits() const { return deficits_; }

    std::optional<Rnti> cursor(SliceId slice, int cls, Direction d) const;
    void set_cursor(SliceId slice, int cls, Direction d, Rnti rnti);

    void forget_slice(SliceId id);

    bool operator==(const SchedulerState&) const = default;

private:
    DeficitLedger deficits_;
    std::map<std::tuple<SliceId, int, Direction>, Rnti> cursors_;
};

/// Two-level allocation of one TTI in one direction.
///
/// Quotas come from slice_prb_quota. Each slice, in settlement order, hands its
/// quota one PRB at a time to its backlogged UEs; PRB indices are assigned in
/// grant order starting at 0. With reoffer_idle_prbs the leftover PRBs are
/// then offered to slices again in settlement order. A UE stays backlogged
/// while its queue (in bits) exceeds the bits already granted this TTI; on
/// return each UE queue has been reduced by granted bits / 8, floored at 0.
TtiAllocation allocate_tti(const CellConfig& cell, std::span<const SliceDescriptor> slices,
                           std::span<UeContext> ues, SchedulerState& state,
                           std::uint64_t tti_index, Direction direction,
                           const AllocationOptions& options = {});

}  // namespace slicesim::radio
