#include "slicesim/control/agent.hpp"

#include "slicesim/common/error.hpp"
#include "slicesim/control/control_plane.hpp"

namespace slicesim::control {

Agent::Agent(radio::CellConfig cell, SliceRegistry registry, std::vector<radio::UeContext> ues,
             radio::AllocationOptions options)
    : cell_(cell), registry_(std::move(registry)), ues_(std::move(ues)), options_(options) {
    for (auto& ue : ues_) {
        auto it = registry_.bindings().find(ue.rnti);
        if (it == registry_.bindings().end()) {
            throw ConfigError("ue " + std::to_string(ue.rnti) + " is not attached to any slice");
        }
        ue.slice_id = it->second;
    }
}

void Agent::apply(const json& message) {
    ControlMessage m;
    try {
        m = message_from_json(message);
        registry_.apply(m);
    } catch (const ControlError& e) {
        throw InvariantViolation("agent rejected southbound message " + message.dump() + ": " + e.what());
    }
    if (const auto* r = std::get_if<UeRelocation>(&m)) {
        // Queued bytes travel with the UE; only the binding changes.
        if (auto* ue = radio::find_ue(std::span<radio::UeContext>(ues_), r->rnti)) {
            ue->slice_id = r->target_slice_id;
        }
        return;
    }
    const auto& cmd = std::get<SliceCommand>(m);
    scheduler_.deficits().reset();
    if (cmd.kind == SliceCommand::Kind::Delete) scheduler_.forget_slice(cmd.slice_id);
}

std::size_t southbound_exchange(ControlPlane& controller, Agent& agent, std::uint64_t tti) {
    const auto messages = controller.drain(tti);
    for (const auto& m : messages) agent.apply(m);
    return messages.size();
}

}  // namespace slicesim::control
