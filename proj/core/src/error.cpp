#include "readsort/error.hpp"

namespace readsort {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::FrozenModel: return "FrozenModel";
    case ErrorCode::MalformedFasta: return "MalformedFasta";
    case ErrorCode::EmptyDb: return "EmptyDb";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptyRead: return "EmptyRead";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::CorruptSidecar: return "CorruptSidecar";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CorruptContainer: return "CorruptContainer";
    case ErrorCode::DesyncDetected: return "DesyncDetected";
    case ErrorCode::ToolMissing: return "ToolMissing";
    case ErrorCode::ToolFailed: return "ToolFailed";
    case ErrorCode::RefTooShort: return "RefTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace readsort
