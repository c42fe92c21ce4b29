#include "slicesim/radio/quota.hpp"

#include <algorithm>
#include <vector>

namespace slicesim::radio {

double DeficitLedger::carryover(SliceId id, Direction d) const {
    return static_cast<double>(carryover_micro(id, d)) / kUnit;
}

std::int64_t DeficitLedger::carryover_micro(SliceId id, Direction d) const {
    auto it = micro_.find({id, d});
    return it == micro_.end() ? 0 : it->second;
}

void DeficitLedger::set_carryover_micro(SliceId id, Direction d, std::int64_t micro) {
    micro_[{id, d}] = micro;
}

void DeficitLedger::forget(SliceId id) {
    for (auto d : kDirections) micro_.erase({id, d});
}

void DeficitLedger::reset() { micro_.clear(); }

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

QuotaMap slice_prb_quota(std::span<const SliceDescriptor> slices, int prb_count,
                         DeficitLedger& ledger, Direction direction) {
    struct Entry {
        const SliceDescriptor* slice;
        std::int64_t entitlement;  // micro-PRBs
        std::int64_t quota;
        std::int64_t remainder;    // micro-PRBs above the floor
    };

    std::vector<Entry> entries;
    entries.reserve(slices.size());
    std::int64_t assigned = 0;
    for (const auto* s : settlement_order(slices)) {
        const std::int64_t ent = s->share(direction).ppm() * prb_count +
                                 ledger.carryover_micro(s->slice_id, direction);
        const std::int64_t floor_prbs = floor_div(ent, DeficitLedger::kUnit);
        Entry e{s, ent, std::max<std::int64_t>(floor_prbs, 0), 0};
        if (floor_prbs >= 0) e.remainder = ent - floor_prbs * DeficitLedger::kUnit;
        assigned += e.quota;
        entries.push_back(e);
    }

    std::vector<Entry*> candidates;
    for (auto& e : entries) {
        if (e.remainder > 0) candidates.push_back(&e);
    }
    // entries are already in settlement order; stable sort keeps it for ties.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Entry* a, const Entry* b) { return a->remainder > b->remainder; });
    for (auto* e : candidates) {
        if (assigned >= prb_count) break;
        ++e->quota;
        ++assigned;
    }

    QuotaMap quotas;
    for (const auto& e : entries) {
        ledger.set_carryover_micro(e.slice->slice_id, direction,
                                   e.entitlement - e.quota * DeficitLedger::kUnit);
        quotas[e.slice->slice_id] = static_cast<int>(e.quota);
    }
    return quotas;
}

}  // namespace slicesim::radio
