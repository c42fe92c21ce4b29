#include "slicesim/apps/event_source.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "slicesim/common/error.hpp"

namespace slicesim::apps {

void EventSourceConfig::validate() const {
    if (mode == Mode::Poisson && !(rate_hz > 0.0)) {
        throw ConfigError("Poisson event source needs rate_hz > 0");
    }
    if (mode == Mode::Scripted) {
        if (times_s.empty()) throw ConfigError("scripted event source needs at least one time");
        if (!std::is_sorted(times_s.begin(), times_s.end())) {
            throw ConfigError("scripted event times must be sorted");
        }
    }
    if (deadline <= SimTime::zero()) throw ConfigError("event deadline must be positive");
    if (command_size_bytes < 16) throw ConfigError("operator commands are at least 16 bytes");
}

std::vector<std::byte> encode(const OperatorCommand& c, std::int64_t size) {
    std::vector<std::byte> wire(static_cast<std::size_t>(std::max<std::int64_t>(size, 16)));
    const std::int64_t created = c.created.count();
    std::memcpy(wire.data(), &c.seq, 8);
    std::memcpy(wire.data() + 8, &created, 8);
    return wire;
}

OperatorCommand decode_operator_command(const std::vector<std::byte>& wire) {
    if (wire.size() < 16) throw std::invalid_argument("operator command too short");
    OperatorCommand c;
    std::int64_t created = 0;
    std::memcpy(&c.seq, wire.data(), 8);
    std::memcpy(&created, wire.data() + 8, 8);
    c.created = SimTime{created};
    return c;
}

EventSource::EventSource(EventSourceConfig cfg, RngStream stream)
    : cfg_(std::move(cfg)), stream_(std::move(stream)) {
    if (cfg_.mode == EventSourceConfig::Mode::Poisson) {
        next_ = from_seconds(stream_.exponential(cfg_.rate_hz));
    } else if (!cfg_.times_s.empty()) {
        next_ = from_seconds(cfg_.times_s.front());
    }
}

void EventSource::advance() {
    if (cfg_.mode == EventSourceConfig::Mode::Poisson) {
        next_ = *next_ + from_seconds(stream_.exponential(cfg_.rate_hz));
    } else if (++script_index_ < cfg_.times_s.size()) {
        next_ = from_seconds(cfg_.times_s[script_index_]);
    } else {
        next_.reset();
    }
}

std::vector<OperatorCommand> EventSource::step(SimTime now) {
    std::vector<OperatorCommand> out;
    while (next_ && *next_ <= now) {
        out.push_back({next_seq_++, *next_});
        advance();
    }
    return out;
}

LatencyRecord event_latency_record(const OperatorCommand& cmd, SimTime delivered_at,
                                   SimTime deadline) {
    const SimTime latency = delivered_at - cmd.created;
    return {latency, latency <= deadline};
}

}  // namespace slicesim::apps
