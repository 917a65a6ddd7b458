#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace alignkit {

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  NonPositiveRadius,
  NotCentered,
  NotOrthogonal,
  AngleCountMismatch,
  DegenerateClusters,
  Parse,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::AngleCountMismatch: return "AngleCountMismatch";
    case ErrorKind::DegenerateClusters: return "DegenerateClusters";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind drives CLI exit codes;
/// sequence operations additionally record the 1-based timestep at fault.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::size_t>& timestep() const noexcept { return timestep_; }

  static Error at_timestep(const Error& cause, std::size_t timestep) {
    Error e(cause.kind(), "timestep " + std::to_string(timestep) + ": " + cause.what());
    e.timestep_ = timestep;
    return e;
  }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> timestep_;
};

}  // namespace alignkit
