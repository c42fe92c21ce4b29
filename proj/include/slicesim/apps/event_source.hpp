#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "slicesim/common/rng.hpp"
#include "slicesim/common/time.hpp"

namespace slicesim::apps {

struct EventSourceConfig {
    enum class Mode { Poisson, Scripted };

    Mode mode = Mode::Poisson;
    double rate_hz = 0.5;
    std::vector<double> times_s;  // Scripted
    std::int64_t command_size_bytes = 64;
    SimTime deadline = std::chrono::milliseconds(50);

    void validate() const;
};

/// Actuation command sent uplink by the human operator.
struct OperatorCommand {
    std::uint64_t seq = 0;
    SimTime created{};
};

/// seq and creation time followed by zero padding up to `size` bytes.
std::vector<std::byte> encode(const OperatorCommand& c, std::int64_t size);
OperatorCommand decode_operator_command(const std::vector<std::byte>& wire);

/// Emits operator commands at Poisson or scripted instants.
class EventSource {
public:
    /// `stream` must be dedicated to this source.
    EventSource(EventSourceConfig cfg, RngStream stream);

    /// Instant of the next command, or nullopt when a script is exhausted.
    std::optional<SimTime> next_emission() const { return next_; }

    /// Every command due at or before `now`, in emission order.
    std::vector<OperatorCommand> step(SimTime now);

    const EventSourceConfig& config() const { return cfg_; }

private:
    void advance();

    EventSourceConfig cfg_;
    RngStream stream_;
    std::optional<SimTime> next_;
    std::size_t script_index_ = 0;
    std::uint64_t next_seq_ = 1;
};

struct LatencyRecord {
    SimTime latency{};
    bool deadline_met = false;
};

LatencyRecord event_latency_record(const OperatorCommand& cmd, SimTime delivered_at,
                                   SimTime deadline);

}  // namespace slicesim::apps
