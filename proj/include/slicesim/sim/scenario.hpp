#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicesim/apps/control_loop.hpp"
#include "slicesim/apps/event_source.hpp"
#include "slicesim/apps/video.hpp"
#include "slicesim/control/autoscale.hpp"
#include "slicesim/radio/cell_config.hpp"
#include "slicesim/radio/scheduler.hpp"
#include "slicesim/radio/transport.hpp"

namespace slicesim::sim {

using nlohmann::json;
using radio::Rnti;
using radio::SliceId;

enum class Mode { Baseline, Sliced };

enum class AppKind { None, Robot, Operator, Video };

struct UeSpec {
    Rnti rnti = 0;
    std::string imsi;
    AppKind app = AppKind::None;
    SliceId slice_id = radio::kUnslicedId;
    int cqi_dl = 15;
    int cqi_ul = 15;
    bool control_priority = false;
};

struct TimelineAction {
    enum class Kind { RelocateUe, UpdateSlice, EnableAutoscale };

    double t_s = 0.0;
    Kind kind = Kind::RelocateUe;
    Rnti rnti = 0;         // RelocateUe
    SliceId slice_id = 0;  // RelocateUe target, UpdateSlice subject
    json patch;            // UpdateSlice fields to change
};

struct ScenarioConfig {
    std::string cell_preset = "lte10";  // empty when the cell is explicit
    radio::CellConfig cell = *radio::numerology_preset("lte10");
    Mode mode = Mode::Sliced;
    /// Share of the grid the implicit pool may use in Baseline mode.
    double baseline_pool_share = 1.0;
    /// Defaults: priority classes in Baseline mode, round-robin when sliced.
    std::optional<radio::IntraSlicePolicy> intra_slice_policy;
    /// Sliced mode only; the baseline pool never borrows.
    bool reoffer_idle_prbs = true;
    std::vector<radio::SliceDescriptor> slices;
    std::vector<UeSpec> ues;
    radio::LinkImpairment link;
    std::vector<TimelineAction> timeline;
    control::AutoscalePolicy autoscale;
    double stats_period_s = 0.1;
    double duration_s = 60.0;
    std::uint64_t seed = 1;

    apps::RobotAppConfig robot;
    apps::EventSourceConfig operator_app;
    apps::VideoConfig video;

    /// Throws ConfigError.
    void validate() const;

    radio::IntraSlicePolicy policy() const;
    radio::AllocationOptions allocation_options() const;
    std::uint64_t total_ttis() const;
    std::uint64_t stats_period_ttis() const;
};

/// Strict: unknown keys are errors. Throws ConfigError.
ScenarioConfig scenario_from_json(const json& j);

/// Every field, defaults included. Round-trips through scenario_from_json.
json to_json(const ScenarioConfig& c);

/// Reads a JSON scenario file, or a shipped preset given as "preset:<name>".
/// Throws ConfigError.
ScenarioConfig load_scenario(const std::string& source);

std::string_view to_string(AppKind a);
std::string_view to_string(Mode m);

}  // namespace slicesim::sim
