#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgmdd {

enum class ErrorCode {
    InvalidArgument,
    UnknownNamespace,
    UnknownEntity,
    UnknownRelation,
    UnknownElement,
    DuplicateNamespace,
    DuplicateLabelInNamespace,
    ParseError,
    CycleDetected,
    UnresolvedParent,
    MissingTerminology,
    UnsupportedBelTerm,
    SnapshotVersion,
    ArityMismatch,
    NotLayered,
    OrderMismatch,
    ValueOutOfDomain,
    EmptyLayerDomain,
    AnchorNotInLayer,
    InvalidSpec,
    NotADag,
    OrderIncomplete,
    UnknownEntityInConflictEdge,
};

/// Stable machine-readable name, e.g. "UnknownNamespace".
std::string_view code_name(ErrorCode code);

/// Every library failure is reported as an Error carrying a code. The
/// optional parameter names the offending input (used by the HTTP layer).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string parameter = {})
        : std::runtime_error(message), code_(code), parameter_(std::move(parameter)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& parameter() const noexcept { return parameter_; }

private:
    ErrorCode code_;
    std::string parameter_;
};

}  // namespace kgmdd
