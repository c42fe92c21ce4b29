#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "slicesim/common/time.hpp"

namespace slicesim::radio {

inline constexpr int kMinCqi = 1;
inline constexpr int kMaxCqi = 15;

/// Bits carried by one PRB in one TTI, indexed by CQI - 1.
using CqiTable = std::array<std::int64_t, kMaxCqi>;

/// CQI 15 -> 600 bits, linear down to CQI 1 -> 40 bits.
CqiTable default_cqi_table();

/// floor(0.9 * bandwidth / (12 * subcarrier spacing)). Throws ConfigError on
/// non-positive inputs or a grid smaller than one PRB.
int derive_prb_count(std::int64_t bandwidth_hz, std::int64_t subcarrier_spacing_hz);

struct CellConfig {
    std::int64_t bandwidth_hz = 10'000'000;
    std::int64_t subcarrier_spacing_hz = 15'000;
    int prb_count = 50;
    SimTime tti = std::chrono::milliseconds(1);
    CqiTable bits_per_prb = default_cqi_table();

    /// Bits per PRB for a CQI index; throws std::out_of_range outside 1..15.
    std::int64_t bits_for_cqi(int cqi) const;
};

/// Builds a validated cell. `prb_override` replaces the derived grid size.
CellConfig make_cell(std::int64_t bandwidth_hz, std::int64_t subcarrier_spacing_hz,
                     std::optional<int> prb_override = std::nullopt,
                     SimTime tti = std::chrono::milliseconds(1),
                     const CqiTable& table = default_cqi_table());

/// "lte10" (10 MHz / 15 kHz) or "nr80" (80 MHz / 30 kHz); nullopt otherwise.
std::optional<CellConfig> numerology_preset(std::string_view name);

}  // namespace slicesim::radio
