#pragma once

#include <cstdint>
#include <vector>

#include "slicesim/control/codec.hpp"
#include "slicesim/control/registry.hpp"
#include "slicesim/radio/cell_config.hpp"
#include "slicesim/radio/scheduler.hpp"

namespace slicesim::control {

class ControlPlane;

/// Base-station side of the southbound channel: owns the slice set, the UE
/// contexts and the scheduler state the allocator runs on.
class Agent {
public:
    Agent(radio::CellConfig cell, SliceRegistry registry, std::vector<radio::UeContext> ues,
          radio::AllocationOptions options);

    /// Applies one southbound message. Share or slice-set changes restart the
    /// deficit accounts; deleted slices drop their scheduler state. Throws
    /// InvariantViolation if the message does not apply, since the controller
    /// validated it already.
    void apply(const json& message);

    const radio::CellConfig& cell() const { return cell_; }
    const SliceRegistry& registry() const { return registry_; }
    const std::vector<SliceDescriptor>& slices() const { return registry_.slices(); }
    std::vector<radio::UeContext>& ues() { return ues_; }
    const std::vector<radio::UeContext>& ues() const { return ues_; }
    radio::SchedulerState& scheduler() { return scheduler_; }
    const radio::AllocationOptions& options() const { return options_; }

private:
    radio::CellConfig cell_;
    SliceRegistry registry_;
    std::vector<radio::UeContext> ues_;
    radio::SchedulerState scheduler_;
    radio::AllocationOptions options_;
};

/// TTI-boundary exchange: everything the controller queued is applied by the
/// agent before the TTI is allocated. Returns the number of messages applied.
std::size_t southbound_exchange(ControlPlane& controller, Agent& agent, std::uint64_t tti);

}  // namespace slicesim::control
