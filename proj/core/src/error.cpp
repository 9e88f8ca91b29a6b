#include "kgmdd/error.hpp"

namespace kgmdd {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnknownNamespace: return "UnknownNamespace";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::UnknownElement: return "UnknownElement";
        case ErrorCode::DuplicateNamespace: return "DuplicateNamespace";
        case ErrorCode::DuplicateLabelInNamespace: return "DuplicateLabelInNamespace";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnresolvedParent: return "UnresolvedParent";
        case ErrorCode::MissingTerminology: return "MissingTerminology";
        case ErrorCode::UnsupportedBelTerm: return "UnsupportedBelTerm";
        case ErrorCode::SnapshotVersion: return "SnapshotVersion";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::NotLayered: return "NotLayered";
        case ErrorCode::OrderMismatch: return "OrderMismatch";
        case ErrorCode::ValueOutOfDomain: return "ValueOutOfDomain";
        case ErrorCode::EmptyLayerDomain: return "EmptyLayerDomain";
        case ErrorCode::AnchorNotInLayer: return "AnchorNotInLayer";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::NotADag: return "NotADag";
        case ErrorCode::OrderIncomplete: return "OrderIncomplete";
        case ErrorCode::UnknownEntityInConflictEdge: return "UnknownEntityInConflictEdge";
    }
    return "Unknown";
}

}  // namespace kgmdd
