#include "slicesim/common/event_queue.hpp"

#include <tuple>
#include <utility>

namespace slicesim {

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
    return std::tuple(a.time, a.cls, a.seq) > std::tuple(b.time, b.cls, b.seq);
}

void EventQueue::schedule(SimTime time, EventClass cls, std::function<void()> fire) {
    heap_.push(Event{time, cls, next_seq_++, std::move(fire)});
}

Event EventQueue::pop() {
    // priority_queue::top is const; the copy is cheap relative to event work.
    Event e = heap_.top();
    heap_.pop();
    return e;
}

}  // namespace slicesim
