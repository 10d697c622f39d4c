#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace softtile {

enum class ErrorKind {
  Usage,
  InvalidArgument,
  InvalidAspect,
  Infeasible,
  OddCount,
  OverUtilization,
  Parse,
  Validation,
  VersionMismatch,
  SingularFit,
  MissingCharacterization,
  NotPublished,
  IncompleteDb,
  Division,
  Internal,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidAspect: return "invalid-aspect";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::OddCount: return "odd-count";
    case ErrorKind::OverUtilization: return "over-utilization";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::VersionMismatch: return "version-mismatch";
    case ErrorKind::SingularFit: return "singular-fit";
    case ErrorKind::MissingCharacterization: return "missing-characterization";
    case ErrorKind::NotPublished: return "not-in-table";
    case ErrorKind::IncompleteDb: return "incomplete-db";
    case ErrorKind::Division: return "division";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code table) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace softtile
