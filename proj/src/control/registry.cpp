#include "slicesim/control/registry.hpp"

#include <algorithm>
#include <set>

namespace slicesim::control {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadRequest: return "BadRequest";
        case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
        case ErrorCode::DuplicateSliceId: return "DuplicateSliceId";
        case ErrorCode::UnknownSliceId: return "UnknownSliceId";
        case ErrorCode::ShareSumExceeded: return "ShareSumExceeded";
        case ErrorCode::SliceNonEmpty: return "SliceNonEmpty";
        case ErrorCode::UnknownRnti: return "UnknownRnti";
        case ErrorCode::SlicingDisabled: return "SlicingDisabled";
    }
    return "?";
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSliceId:
        case ErrorCode::UnknownRnti: return 404;
        case ErrorCode::ShareSumExceeded:
        case ErrorCode::SliceNonEmpty: return 409;
        default: return 400;
    }
}

SliceRegistry SliceRegistry::unsliced(SliceDescriptor pool) {
    SliceRegistry r;
    r.slicing_enabled_ = false;
    r.slices_.push_back(std::move(pool));
    return r;
}

void SliceRegistry::attach(Rnti rnti, SliceId slice) {
    if (bindings_.contains(rnti)) {
        throw ControlError(ErrorCode::BadRequest, "rnti " + std::to_string(rnti) + " already attached");
    }
    if (!find(slice)) {
        throw ControlError(ErrorCode::UnknownSliceId, "no slice " + std::to_string(slice));
    }
    bindings_[rnti] = slice;
}

const SliceDescriptor* SliceRegistry::find(SliceId id) const {
    return radio::find_slice(slices_, id);
}

void SliceRegistry::check_descriptor(const SliceDescriptor& d) const {
    if (d.slice_id <= radio::kUnslicedId) {
        throw ControlError(ErrorCode::InvalidDescriptor, "slice_id must be positive");
    }
    for (auto s : {d.dl_share, d.ul_share}) {
        if (s.ppm() < 0 || s > radio::kFullShare) {
            throw ControlError(ErrorCode::InvalidDescriptor, "share must lie in [0, 1]");
        }
    }
}

void SliceRegistry::check_share_sums(const std::vector<SliceDescriptor>& slices) const {
    for (auto dir : radio::kDirections) {
        radio::Share total;
        for (const auto& s : slices) total = total + s.share(dir);
        if (total > radio::kFullShare) {
            throw ControlError(ErrorCode::ShareSumExceeded,
                               std::string(radio::to_string(dir)) + " shares sum to " +
                                   std::to_string(total.fraction()));
        }
    }
}

void SliceRegistry::check(const SliceCommand& cmd) const {
    if (!slicing_enabled_) throw ControlError(ErrorCode::SlicingDisabled, "slicing is disabled");
    const SliceId id = cmd.target();
    const bool exists = find(id) != nullptr;
    std::vector<SliceDescriptor> after = slices_;
    switch (cmd.kind) {
        case SliceCommand::Kind::Create:
            check_descriptor(cmd.descriptor);
            if (exists) {
                throw ControlError(ErrorCode::DuplicateSliceId, "slice " + std::to_string(id) + " exists");
            }
            after.push_back(cmd.descriptor);
            break;
        case SliceCommand::Kind::Update:
            if (!exists) throw ControlError(ErrorCode::UnknownSliceId, "no slice " + std::to_string(id));
            check_descriptor(cmd.descriptor);
            std::ranges::replace_if(after, [&](const auto& s) { return s.slice_id == id; },
                                    cmd.descriptor);
            break;
        case SliceCommand::Kind::Delete:
            if (!exists) throw ControlError(ErrorCode::UnknownSliceId, "no slice " + std::to_string(id));
            for (const auto& [rnti, bound] : bindings_) {
                if (bound == id) {
                    throw ControlError(ErrorCode::SliceNonEmpty,
                                       "slice " + std::to_string(id) + " still hosts rnti " +
                                           std::to_string(rnti));
                }
            }
            return;
    }
    check_share_sums(after);
}

void SliceRegistry::check(const UeRelocation& r) const {
    if (!slicing_enabled_) throw ControlError(ErrorCode::SlicingDisabled, "slicing is disabled");
    if (!bindings_.contains(r.rnti)) {
        throw ControlError(ErrorCode::UnknownRnti, "no ue with rnti " + std::to_string(r.rnti));
    }
    if (!find(r.target_slice_id)) {
        throw ControlError(ErrorCode::UnknownSliceId, "no slice " + std::to_string(r.target_slice_id));
    }
}

void SliceRegistry::check(const ControlMessage& m) const {
    std::visit([this](const auto& x) { check(x); }, m);
}

void SliceRegistry::apply(const SliceCommand& cmd) {
    check(cmd);
    switch (cmd.kind) {
        case SliceCommand::Kind::Create:
            slices_.insert(std::ranges::upper_bound(slices_, cmd.descriptor.slice_id, {},
                                                    &SliceDescriptor::slice_id),
                           cmd.descriptor);
            break;
        case SliceCommand::Kind::Update:
            std::ranges::replace_if(slices_, [&](const auto& s) { return s.slice_id == cmd.target(); },
                                    cmd.descriptor);
            break;
        case SliceCommand::Kind::Delete:
            std::erase_if(slices_, [&](const auto& s) { return s.slice_id == cmd.slice_id; });
            break;
    }
}

void SliceRegistry::apply(const UeRelocation& r) {
    check(r);
    bindings_[r.rnti] = r.target_slice_id;
}

void SliceRegistry::apply(const ControlMessage& m) {
    std::visit([this](const auto& x) { apply(x); }, m);
}

bool SliceRegistry::valid() const {
    std::set<SliceId> ids;
    for (const auto& s : slices_) {
        if (!ids.insert(s.slice_id).second) return false;
        if (s.dl_share.ppm() < 0 || s.ul_share.ppm() < 0) return false;
    }
    for (auto dir : radio::kDirections) {
        radio::Share total;
        for (const auto& s : slices_) total = total + s.share(dir);
        if (total > radio::kFullShare) return false;
    }
    return std::ranges::all_of(bindings_, [&](const auto& b) { return ids.contains(b.second); });
}

}  // namespace slicesim::control
