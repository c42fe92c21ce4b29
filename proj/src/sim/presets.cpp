#include "slicesim/sim/presets.hpp"

#include <numbers>

namespace slicesim::sim {

namespace {

ScenarioConfig common() {
    ScenarioConfig c;
    c.cell_preset = "lte10";
    c.cell = *radio::numerology_preset("lte10");
    c.duration_s = 60.0;
    c.seed = 20190916;
    c.ues = {
        {kRobotRnti, "001010000002836", AppKind::Robot, radio::kUnslicedId, 15, 15, true},
        {kOperatorRnti, "001010000002837", AppKind::Operator, radio::kUnslicedId, 15, 15, true},
        {kVideoRnti, "001010000002838", AppKind::Video, radio::kUnslicedId, 15, 15, false},
    };
    c.robot.path.kind = apps::PathKind::Circle;
    c.robot.path.center = {0.0, 0.0};
    c.robot.path.radius = 1.0;
    c.robot.initial_pose = {1.1, 0.0, std::numbers::pi / 2};
    return c;
}

ScenarioConfig baseline() {
    auto c = common();
    c.mode = Mode::Baseline;
    c.baseline_pool_share = 0.05;
    return c;
}

ScenarioConfig sliced() {
    auto c = common();
    c.mode = Mode::Sliced;
    radio::SliceDescriptor control{1, "control", radio::Share::from_ppm(50'000), radio::Share::from_ppm(50'000),
                                   10, radio::RbAvailability::High};
    radio::SliceDescriptor data{2, "data", radio::Share::from_ppm(950'000), radio::Share::from_ppm(950'000), 1,
                                radio::RbAvailability::Low};
    c.slices = {control, data};
    for (auto& u : c.ues) u.slice_id = 1;
    TimelineAction relocate;
    relocate.t_s = 30.0;
    relocate.kind = TimelineAction::Kind::RelocateUe;
    relocate.rnti = kVideoRnti;
    relocate.slice_id = 2;
    c.timeline = {relocate};
    return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"paper-baseline", "paper-sliced"}; }

std::optional<ScenarioConfig> find_preset(std::string_view name) {
    if (name == "paper-baseline") return baseline();
    if (name == "paper-sliced") return sliced();
    return std::nullopt;
}

}  // namespace slicesim::sim
