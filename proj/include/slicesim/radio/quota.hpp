#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>

#include "slicesim/radio/slice.hpp"

namespace slicesim::radio {

/// Fractional PRBs owed to each slice per direction, carried between TTIs.
///
/// Stored in millionths of a PRB so that entitlements computed from ppm shares
/// stay exact. After every settlement each carryover lies in (-1, +1) PRB.
class DeficitLedger {
public:
    static constexpr std::int64_t kUnit = Share::kScale;

    /// Carryover in PRBs.
    double carryover(SliceId id, Direction d) const;
    std::int64_t carryover_micro(SliceId id, Direction d) const;
    void set_carryover_micro(SliceId id, Direction d, std::int64_t micro);

    void forget(SliceId id);
    /// Zeroes every account. Called whenever the slice set or shares change so
    /// that the sum of carryovers never exceeds zero.
    void reset();

    bool operator==(const DeficitLedger&) const = default;

private:
    std::map<std::pair<SliceId, Direction>, std::int64_t> micro_;
};

/// Integer PRB quota for this TTI, per slice id.
using QuotaMap = std::map<SliceId, int>;

/// Splits `prb_count` PRBs into per-slice quotas for one TTI and settles the
/// deficit ledger.
///
/// Entitlement is share * prb_count + carryover; each slice first receives the
/// floor of it. Leftover PRBs go one at a time, at most one per slice, to the
/// slices with the largest positive fractional remainder, ties broken by
/// settlement order. Carryover becomes entitlement - quota.
QuotaMap slice_prb_quota(std::span<const SliceDescriptor> slices, int prb_count,
                         DeficitLedger& ledger, Direction direction);

}  // namespace slicesim::radio
