#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "slicesim/common/time.hpp"

namespace slicesim {

/// Tie-break class for events scheduled at the same instant.
enum class EventClass : std::uint8_t {
    TimelineAction = 0,
    TtiBoundary = 1,
    AppTimer = 2,
};

struct Event {
    SimTime time{};
    EventClass cls = EventClass::AppTimer;
    std::uint64_t seq = 0;
    std::function<void()> fire;
};

/// Pending events totally ordered by (time, class, insertion sequence).
class EventQueue {
public:
    void schedule(SimTime time, EventClass cls, std::function<void()> fire);

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    SimTime next_time() const { return heap_.top().time; }

    /// Removes and returns the earliest event.
    Event pop();

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const;
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace slicesim
