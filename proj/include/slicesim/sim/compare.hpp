#pragma once

#include "json.hpp"

namespace slicesim::sim {

using nlohmann::json;

/// Headline differences between two run reports (b relative to a), plus
/// flags for stalls reduced, goodput improved and control RTT p99 within 1 ms.
///
/// Throws ConfigError when the reports are not comparable: different run
/// length or stats period, or either lacks a summary.
json compare_runs(const json& a, const json& b);

}  // namespace slicesim::sim
