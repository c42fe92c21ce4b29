#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slicesim/radio/slice.hpp"

namespace slicesim::control {

using radio::Rnti;
using radio::SliceDescriptor;
using radio::SliceId;

enum class ErrorCode {
    BadRequest,
    InvalidDescriptor,
    DuplicateSliceId,
    UnknownSliceId,
    ShareSumExceeded,
    SliceNonEmpty,
    UnknownRnti,
    SlicingDisabled,
};

std::string_view to_string(ErrorCode code);

/// HTTP status used by the northbound API for each error.
int http_status(ErrorCode code);

class ControlError : public std::runtime_error {
public:
    ControlError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct SliceCommand {
    enum class Kind { Create, Update, Delete };

    Kind kind = Kind::Create;
    SliceDescriptor descriptor;  // Create and Update
    SliceId slice_id = 0;        // Delete

    static SliceCommand create(SliceDescriptor d) {
        const SliceId id = d.slice_id;
        return {Kind::Create, std::move(d), id};
    }
    static SliceCommand update(SliceDescriptor d) {
        const SliceId id = d.slice_id;
        return {Kind::Update, std::move(d), id};
    }
    static SliceCommand remove(SliceId id) { return {Kind::Delete, {}, id}; }

    SliceId target() const { return kind == Kind::Delete ? slice_id : descriptor.slice_id; }
};

struct UeRelocation {
    Rnti rnti = 0;
    SliceId target_slice_id = 0;
};

using ControlMessage = std::variant<SliceCommand, UeRelocation>;

/// Slices plus the slice binding of every attached UE.
///
/// Each command is checked against the full post-command state before any
/// mutation, so a rejected command leaves the registry untouched.
class SliceRegistry {
public:
    /// Empty registry with slicing enabled.
    SliceRegistry() = default;

    /// Slicing disabled: one implicit pool that every UE belongs to. Slice
    /// commands and relocations fail with SlicingDisabled.
    static SliceRegistry unsliced(SliceDescriptor pool);

    bool slicing_enabled() const { return slicing_enabled_; }

    /// Attaches a UE. Throws UnknownSliceId or BadRequest on duplicate RNTI.
    void attach(Rnti rnti, SliceId slice);

    void check(const SliceCommand& cmd) const;
    void check(const UeRelocation& r) const;
    void check(const ControlMessage& m) const;

    void apply(const SliceCommand& cmd);
    void apply(const UeRelocation& r);
    void apply(const ControlMessage& m);

    /// Sorted by ascending id.
    const std::vector<SliceDescriptor>& slices() const { return slices_; }
    const SliceDescriptor* find(SliceId id) const;
    const std::map<Rnti, SliceId>& bindings() const { return bindings_; }

    /// Share sums, id uniqueness and bindings all hold.
    bool valid() const;

    bool operator==(const SliceRegistry&) const = default;

private:
    void check_descriptor(const SliceDescriptor& d) const;
    void check_share_sums(const std::vector<SliceDescriptor>& slices) const;

    bool slicing_enabled_ = true;
    std::vector<SliceDescriptor> slices_;
    std::map<Rnti, SliceId> bindings_;
};

}  // namespace slicesim::control
