#include "slicesim/radio/slice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicesim::radio {

Share Share::from_fraction(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("share must lie in [0, 1]");
    }
    return Share(static_cast<std::int64_t>(std::llround(fraction * kScale)));
}

bool settles_before(const SliceDescriptor& a, const SliceDescriptor& b) {
    if (a.rb_availability != b.rb_availability) {
        return a.rb_availability == RbAvailability::High;
    }
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.slice_id < b.slice_id;
}

std::vector<const SliceDescriptor*> settlement_order(std::span<const SliceDescriptor> slices) {
    std::vector<const SliceDescriptor*> order;
    order.reserve(slices.size());
    for (const auto& s : slices) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return settles_before(*a, *b); });
    return order;
}

const SliceDescriptor* find_slice(std::span<const SliceDescriptor> slices, SliceId id) {
    for (const auto& s : slices) {
        if (s.slice_id == id) return &s;
    }
    return nullptr;
}

UeContext* find_ue(std::span<UeContext> ues, Rnti rnti) {
    for (auto& u : ues) {
        if (u.rnti == rnti) return &u;
    }
    return nullptr;
}

const UeContext* find_ue(std::span<const UeContext> ues, Rnti rnti) {
    for (const auto& u : ues) {
        if (u.rnti == rnti) return &u;
    }
    return nullptr;
}

}  // namespace slicesim::radio
