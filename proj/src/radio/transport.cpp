#include "slicesim/radio/transport.hpp"

#include <algorithm>
#include <string>

namespace slicesim::radio {

Transport::Transport(LinkImpairment link, SimTime tti, std::uint64_t seed)
    : link_(link), tti_(tti), seed_(seed) {}

Transport::Flow& Transport::flow(Rnti rnti, Direction d) { return flows_[{rnti, d}]; }

RngStream& Transport::loss_stream(Rnti rnti) {
    auto it = loss_streams_.find(rnti);
    if (it == loss_streams_.end()) {
        it = loss_streams_.emplace(rnti, RngStream(seed_, "loss/" + std::to_string(rnti))).first;
    }
    return it->second;
}

void Transport::sync(const Flow& f, Rnti rnti, Direction d, std::span<UeContext> ues) {
    if (auto* ue = find_ue(ues, rnti)) ue->queue_bytes(d) = f.acct.queued;
}

void Transport::enqueue(Packet packet, std::span<UeContext> ues) {
    if (packet.id == 0) packet.id = next_packet_id_++;
    packet.remaining_bytes = packet.size_bytes;
    auto& f = flow(packet.rnti, packet.direction);
    f.acct.enqueued += packet.size_bytes;
    f.acct.queued += packet.size_bytes;
    const auto rnti = packet.rnti;
    const auto dir = packet.direction;
    f.queue.push_back(std::move(packet));
    sync(f, rnti, dir, ues);
}

void Transport::release_retransmissions(std::uint64_t tti, std::span<UeContext> ues) {
    for (auto& [key, f] : flows_) {
        if (f.held.empty()) continue;
        // Walk newest first so that packets released together keep their order.
        bool changed = false;
        for (auto it = f.held.rbegin(); it != f.held.rend(); ++it) {
            if (it->release_tti > tti) continue;
            f.acct.in_retransmission -= it->packet.remaining_bytes;
            f.acct.queued += it->packet.remaining_bytes;
            f.queue.push_front(std::move(it->packet));
            it->release_tti = UINT64_MAX;
            changed = true;
        }
        std::erase_if(f.held, [](const Held& h) { return h.release_tti == UINT64_MAX; });
        if (changed) sync(f, key.first, key.second, ues);
    }
}

std::vector<DeliveredPacket> Transport::transport_step(const TtiAllocation& allocation,
                                                       std::span<UeContext> ues,
                                                       SimTime tti_start) {
    std::map<Rnti, std::int64_t> granted_bits;
    for (const auto& g : allocation.grants) granted_bits[g.rnti] += g.bits_served;

    std::vector<DeliveredPacket> delivered;
    const SimTime delivery_at = tti_start + tti_ + link_.processing_delay;
    for (const auto& [rnti, bits] : granted_bits) {
        auto& f = flow(rnti, allocation.direction);
        std::int64_t budget = bits / 8;
        while (budget > 0 && !f.queue.empty()) {
            Packet& head = f.queue.front();
            const std::int64_t take = std::min(budget, head.remaining_bytes);
            budget -= take;
            if (loss_stream(rnti).bernoulli(link_.loss_p)) {
                // Service this TTI is void; the whole packet waits for its retry.
                f.acct.queued -= head.remaining_bytes;
                f.acct.in_retransmission += head.remaining_bytes;
                f.held.push_back(Held{allocation.tti_index +
                                          static_cast<std::uint64_t>(link_.retransmit_delay_ttis),
                                      std::move(head)});
                f.queue.pop_front();
                continue;
            }
            head.remaining_bytes -= take;
            f.acct.queued -= take;
            f.acct.drained += take;
            if (head.remaining_bytes > 0) break;
            DeliveredPacket d;
            d.service_tti = allocation.tti_index;
            d.delivered_at = delivery_at;
            d.delay = delivery_at - head.enqueued_at;
            d.packet = std::move(head);
            f.queue.pop_front();
            delivered.push_back(std::move(d));
        }
        sync(f, rnti, allocation.direction, ues);
    }
    return delivered;
}

FlowAccounting Transport::accounting(Rnti rnti, Direction d) const {
    auto it = flows_.find({rnti, d});
    return it == flows_.end() ? FlowAccounting{} : it->second.acct;
}

FlowAccounting Transport::totals() const {
    FlowAccounting t;
    for (const auto& [key, f] : flows_) {
        t.enqueued += f.acct.enqueued;
        t.drained += f.acct.drained;
        t.queued += f.acct.queued;
        t.in_retransmission += f.acct.in_retransmission;
    }
    return t;
}

std::optional<SimTime> Transport::head_enqueue_time(Rnti rnti, Direction d) const {
    auto it = flows_.find({rnti, d});
    if (it == flows_.end() || it->second.queue.empty()) return std::nullopt;
    return it->second.queue.front().enqueued_at;
}

}  // namespace slicesim::radio
