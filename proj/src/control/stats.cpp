#include "slicesim/control/stats.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace slicesim::control {

void TelemetryBuffer::push(TtiRecord r) {
    records_.push_back(std::move(r));
    if (capacity_ > 0 && records_.size() > capacity_) records_.pop_front();
}

double SliceStats::utilization(Direction d) const {
    const auto q = quota_prbs[idx(d)];
    return q == 0 ? 0.0 : static_cast<double>(used_prbs[idx(d)]) / static_cast<double>(q);
}

const UeStats* StatsReport::ue(Rnti rnti) const {
    auto it = std::ranges::find(ues, rnti, &UeStats::rnti);
    return it == ues.end() ? nullptr : &*it;
}

const SliceStats* StatsReport::slice(SliceId id) const {
    auto it = std::ranges::find(slices, id, &SliceStats::slice_id);
    return it == slices.end() ? nullptr : &*it;
}

namespace {

void finish(StatsReport& r) {
    const double len = r.window_end - r.window_start;
    for (auto& u : r.ues) {
        for (int d = 0; d < 2; ++d) u.throughput_bps[d] = static_cast<double>(u.delivered_bits[d]) / len;
    }
}

}  // namespace

StatsReport report_stats(const TelemetryBuffer& buffer, SimTime start, SimTime end) {
    if (end <= start) throw std::invalid_argument("stats window is empty or inverted");
    std::map<Rnti, UeStats> ues;
    std::map<SliceId, SliceStats> slices;
    for (const auto& rec : buffer.records()) {
        if (rec.start < start || rec.start >= end) continue;
        for (const auto& u : rec.ues) {
            auto& s = ues[u.rnti];
            s.rnti = u.rnti;
            s.slice_id = u.slice_id;
            s.queue_bytes = u.queue_bytes;
            for (int d = 0; d < 2; ++d) s.delivered_bits[d] += u.delivered_bits[d];
        }
        for (const auto& sl : rec.slices) {
            auto& s = slices[sl.slice_id];
            s.slice_id = sl.slice_id;
            for (int d = 0; d < 2; ++d) {
                s.quota_prbs[d] += sl.quota_prbs[d];
                s.granted_prbs[d] += sl.granted_prbs[d];
                s.used_prbs[d] += std::min(sl.granted_prbs[d], sl.quota_prbs[d]);
            }
        }
    }
    StatsReport r;
    r.window_start = to_seconds(start);
    r.window_end = to_seconds(end);
    for (auto& [_, u] : ues) r.ues.push_back(u);
    for (auto& [_, s] : slices) r.slices.push_back(s);
    finish(r);
    return r;
}

StatsReport merge(std::span<const StatsReport> reports) {
    if (reports.empty()) throw std::invalid_argument("nothing to merge");
    std::map<Rnti, UeStats> ues;
    std::map<SliceId, SliceStats> slices;
    StatsReport r;
    r.window_start = reports.front().window_start;
    r.window_end = reports.front().window_end;
    for (const auto& rep : reports) {
        r.window_start = std::min(r.window_start, rep.window_start);
        r.window_end = std::max(r.window_end, rep.window_end);
        for (const auto& u : rep.ues) {
            auto& s = ues[u.rnti];
            s.rnti = u.rnti;
            s.slice_id = u.slice_id;
            s.queue_bytes = u.queue_bytes;
            for (int d = 0; d < 2; ++d) s.delivered_bits[d] += u.delivered_bits[d];
        }
        for (const auto& sl : rep.slices) {
            auto& s = slices[sl.slice_id];
            s.slice_id = sl.slice_id;
            for (int d = 0; d < 2; ++d) {
                s.quota_prbs[d] += sl.quota_prbs[d];
                s.used_prbs[d] += sl.used_prbs[d];
                s.granted_prbs[d] += sl.granted_prbs[d];
            }
        }
    }
    for (auto& [_, u] : ues) r.ues.push_back(u);
    for (auto& [_, s] : slices) r.slices.push_back(s);
    finish(r);
    return r;
}

}  // namespace slicesim::control
