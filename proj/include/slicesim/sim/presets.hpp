#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicesim/sim/scenario.hpp"

namespace slicesim::sim {

/// Robot, operator and video UEs sharing an LTE 10 MHz cell.
/// "paper-baseline": no slices; the shared pool holds 5 % of the grid and
/// control UEs are served first. "paper-sliced": a 5 % control slice and a
/// 95 % data slice, every UE starting in the control slice and the video UE
/// moved to the data slice at 30 s.
std::vector<std::string> preset_names();
std::optional<ScenarioConfig> find_preset(std::string_view name);

/// RNTIs used by the presets.
inline constexpr Rnti kRobotRnti = 2836;
inline constexpr Rnti kOperatorRnti = 2837;
inline constexpr Rnti kVideoRnti = 2838;

}  // namespace slicesim::sim
