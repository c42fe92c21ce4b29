#include "slicesim/radio/cell_config.hpp"

#include <stdexcept>
#include <string>

#include "slicesim/common/error.hpp"

namespace slicesim::radio {

CqiTable default_cqi_table() {
    CqiTable t{};
    for (int cqi = kMinCqi; cqi <= kMaxCqi; ++cqi) {
        t[cqi - 1] = 40 * cqi;
    }
    return t;
}

int derive_prb_count(std::int64_t bandwidth_hz, std::int64_t subcarrier_spacing_hz) {
    if (bandwidth_hz <= 0 || subcarrier_spacing_hz <= 0) {
        throw ConfigError("bandwidth and subcarrier spacing must be positive");
    }
    // 0.9 * bw / (12 * scs) in integers: 9 * bw / (120 * scs).
    const std::int64_t prbs = (9 * bandwidth_hz) / (120 * subcarrier_spacing_hz);
    if (prbs < 1) {
        throw ConfigError("bandwidth " + std::to_string(bandwidth_hz) +
                          " Hz holds no PRB at subcarrier spacing " +
                          std::to_string(subcarrier_spacing_hz) + " Hz");
    }
    return static_cast<int>(prbs);
}

std::int64_t CellConfig::bits_for_cqi(int cqi) const {
    if (cqi < kMinCqi || cqi > kMaxCqi) {
        throw std::out_of_range("CQI out of range: " + std::to_string(cqi));
    }
    return bits_per_prb[cqi - 1];
}

CellConfig make_cell(std::int64_t bandwidth_hz, std::int64_t subcarrier_spacing_hz,
                     std::optional<int> prb_override, SimTime tti, const CqiTable& table) {
    CellConfig cell;
    cell.bandwidth_hz = bandwidth_hz;
    cell.subcarrier_spacing_hz = subcarrier_spacing_hz;
    if (prb_override) {
        if (*prb_override < 1) throw ConfigError("prb_count must be >= 1");
        cell.prb_count = *prb_override;
    } else {
        cell.prb_count = derive_prb_count(bandwidth_hz, subcarrier_spacing_hz);
    }
    if (tti <= SimTime::zero()) throw ConfigError("tti duration must be positive");
    cell.tti = tti;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] < 0) throw ConfigError("CQI table entries must be non-negative");
        if (i > 0 && table[i] < table[i - 1]) {
            throw ConfigError("CQI table must be non-decreasing in CQI index");
        }
    }
    cell.bits_per_prb = table;
    return cell;
}

std::optional<CellConfig> numerology_preset(std::string_view name) {
    if (name == "lte10") return make_cell(10'000'000, 15'000);
    if (name == "nr80") return make_cell(80'000'000, 30'000);
    return std::nullopt;
}

}  // namespace slicesim::radio
