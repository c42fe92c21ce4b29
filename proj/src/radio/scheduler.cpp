#include "slicesim/radio/scheduler.hpp"

#include <algorithm>

namespace slicesim::radio {

std::optional<Rnti> SchedulerState::cursor(SliceId slice, int cls, Direction d) const {
    auto it = cursors_.find({slice, cls, d});
    if (it == cursors_.end()) return std::nullopt;
    return it->second;
}

void SchedulerState::set_cursor(SliceId slice, int cls, Direction d, Rnti rnti) {
    cursors_[{slice, cls, d}] = rnti;
}

void SchedulerState::forget_slice(SliceId id) {
    deficits_.forget(id);
    std::erase_if(cursors_, [id](const auto& kv) { return std::get<0>(kv.first) == id; });
}

namespace {

struct Member {
    UeContext* ue;
    int cls;
    std::int64_t remaining_bits;
    std::int64_t granted_bits = 0;
};

class SliceServer {
public:
    SliceServer(const SliceDescriptor& slice, std::vector<Member*> members, SchedulerState& state,
                Direction direction)
        : slice_(slice), members_(std::move(members)), state_(state), direction_(direction) {}

    /// Picks the next backlogged member, or nullptr when the slice is idle.
    Member* next() {
        int best_class = -1;
        for (const auto* m : members_) {
            if (m->remaining_bits > 0 && (best_class < 0 || m->cls < best_class)) {
                best_class = m->cls;
            }
        }
        if (best_class < 0) return nullptr;

        const auto cursor = state_.cursor(slice_.slice_id, best_class, direction_);
        Member* first = nullptr;
        for (auto* m : members_) {  // members_ sorted by rnti
            if (m->cls != best_class || m->remaining_bits <= 0) continue;
            if (!first) first = m;
            if (cursor && m->ue->rnti > *cursor) return m;
            if (!cursor) return m;
        }
        return first;
    }

    void served(Member& m) {
        state_.set_cursor(slice_.slice_id, m.cls, direction_, m.ue->rnti);
    }

    const SliceDescriptor& slice() const { return slice_; }

private:
    const SliceDescriptor& slice_;
    std::vector<Member*> members_;
    SchedulerState& state_;
    Direction direction_;
};

}  // namespace

TtiAllocation allocate_tti(const CellConfig& cell, std::span<const SliceDescriptor> slices,
                           std::span<UeContext> ues, SchedulerState& state,
                           std::uint64_t tti_index, Direction direction,
                           const AllocationOptions& options) {
    TtiAllocation out;
    out.tti_index = tti_index;
    out.direction = direction;
    out.quotas = slice_prb_quota(slices, cell.prb_count, state.deficits(), direction);

    std::vector<Member> members;
    members.reserve(ues.size());
    for (auto& ue : ues) {
        const int cls =
            options.policy == IntraSlicePolicy::PriorityClasses && !ue.control_priority ? 1 : 0;
        members.push_back(Member{&ue, cls, ue.queue_bytes(direction) * 8});
    }
    std::sort(members.begin(), members.end(),
              [](const Member& a, const Member& b) { return a.ue->rnti < b.ue->rnti; });

    std::vector<SliceServer> servers;
    for (const auto* s : settlement_order(slices)) {
        std::vector<Member*> bound;
        for (auto& m : members) {
            if (m.ue->slice_id == s->slice_id) bound.push_back(&m);
        }
        servers.emplace_back(*s, std::move(bound), state, direction);
    }

    int next_prb = 0;
    auto grant_one = [&](SliceServer& server) {
        Member* m = server.next();
        if (!m) return false;
        const std::int64_t bits = cell.bits_for_cqi(m->ue->cqi(direction));
        out.grants.push_back(Grant{next_prb++, server.slice().slice_id, m->ue->rnti, bits});
        m->remaining_bits -= bits;
        m->granted_bits += bits;
        server.served(*m);
        return true;
    };

    for (auto& server : servers) {
        const int quota = out.quotas[server.slice().slice_id];
        for (int i = 0; i < quota && next_prb < cell.prb_count; ++i) {
            if (!grant_one(server)) break;
        }
    }
    if (options.reoffer_idle_prbs) {
        for (auto& server : servers) {
            while (next_prb < cell.prb_count && grant_one(server)) {
            }
        }
    }

    for (auto& m : members) {
        auto& q = m.ue->queue_bytes(direction);
        q = std::max<std::int64_t>(0, q - m.granted_bits / 8);
    }
    return out;
}

}  // namespace slicesim::radio
