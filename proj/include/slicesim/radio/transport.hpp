#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "slicesim/common/rng.hpp"
#include "slicesim/common/time.hpp"
#include "slicesim/radio/scheduler.hpp"

namespace slicesim::radio {

struct Packet {
    std::uint64_t id = 0;
    Rnti rnti = 0;
    Direction direction = Direction::Downlink;
    std::uint32_t flow = 0;  // application-defined tag
    std::int64_t size_bytes = 0;
    std::int64_t remaining_bytes = 0;
    SimTime enqueued_at{};
    std::vector<std::byte> payload;  // wire bytes; empty for bulk traffic
};

struct LinkImpairment {
    double loss_p = 0.0;
    SimTime processing_delay = std::chrono::milliseconds(1);
    int retransmit_delay_ttis = 8;
};

struct DeliveredPacket {
    Packet packet;
    std::uint64_t service_tti = 0;
    SimTime delivered_at{};
    SimTime delay{};  // delivered_at - enqueued_at
};

/// Byte ledger of one (UE, direction) flow.
struct FlowAccounting {
    std::int64_t enqueued = 0;
    std::int64_t drained = 0;  // committed for delivery
    std::int64_t queued = 0;
    std::int64_t in_retransmission = 0;

    bool conserved() const { return enqueued - drained == queued + in_retransmission; }
};

/// Per-UE FIFO packet queues drained by TTI allocations.
///
/// Granted bits drain head-of-line packets in order. A fully drained packet is
/// delivered one TTI plus the processing delay after the start of the TTI that
/// finished it. With probability loss_p the service a packet received in a TTI
/// is void: the packet leaves the queue and returns to its head
/// retransmit_delay_ttis later. Loss draws come from one stream per UE.
class Transport {
public:
    Transport(LinkImpairment link, SimTime tti, std::uint64_t seed);

    /// Appends to the UE's queue and mirrors the new depth into the UE context.
    void enqueue(Packet packet, std::span<UeContext> ues);

    /// Returns held packets whose retransmission slot has come to queue heads.
    void release_retransmissions(std::uint64_t tti, std::span<UeContext> ues);

    std::vector<DeliveredPacket> transport_step(const TtiAllocation& allocation,
                                                std::span<UeContext> ues, SimTime tti_start);

    FlowAccounting accounting(Rnti rnti, Direction d) const;
    /// Total of every flow.
    FlowAccounting totals() const;

    const LinkImpairment& link() const { return link_; }

    /// Oldest enqueue time among queued packets, if any.
    std::optional<SimTime> head_enqueue_time(Rnti rnti, Direction d) const;

private:
    struct Held {
        std::uint64_t release_tti;
        Packet packet;
    };
    struct Flow {
        std::deque<Packet> queue;
        std::vector<Held> held;
        FlowAccounting acct;
    };

    Flow& flow(Rnti rnti, Direction d);
    RngStream& loss_stream(Rnti rnti);
    static void sync(const Flow& f, Rnti rnti, Direction d, std::span<UeContext> ues);

    LinkImpairment link_;
    SimTime tti_;
    std::uint64_t seed_;
    std::uint64_t next_packet_id_ = 1;
    std::map<std::pair<Rnti, Direction>, Flow> flows_;
    std::map<Rnti, RngStream> loss_streams_;
};

}  // namespace slicesim::radio
