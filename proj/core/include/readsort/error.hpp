#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace readsort {

enum class ErrorCode {
  MalformedRecord,
  IoFailure,
  FrozenModel,
  MalformedFasta,
  EmptyDb,
  EmptyReference,
  EmptyRead,
  InvalidPlan,
  CorruptSidecar,
  DomainError,
  CorruptContainer,
  DesyncDetected,
  ToolMissing,
  ToolFailed,
  RefTooShort,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace readsort
