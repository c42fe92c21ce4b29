#pragma once

#include <chrono>
#include <cstdint>
#include <string_view>

namespace slicesim {

/// Simulated time. Integer nanoseconds keep event ordering exact.
using SimTime = std::chrono::duration<std::int64_t, std::nano>;

constexpr SimTime from_seconds(double s) {
    return SimTime{static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5))};
}

constexpr double to_seconds(SimTime t) { return static_cast<double>(t.count()) / 1e9; }

constexpr double to_millis(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

/// Parses "1s", "250ms", "0.5" (seconds) and similar. Throws std::invalid_argument.
SimTime parse_duration(std::string_view text);

}  // namespace slicesim
