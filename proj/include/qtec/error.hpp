#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtec {

enum class ErrorKind {
  NotHermitian,
  NotUnitary,
  NoConvergence,
  DimensionMismatch,
  OutOfRange,
  NotUnitVector,
  NotDensity,
  ZeroFidelity,
  UnsupportedDimension,
  NonPositiveTime,
  BadInterval,
  FOutOfRange,
  ParseError,
  InvalidChannel,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::NotDensity: return "NotDensity";
    case ErrorKind::ZeroFidelity: return "ZeroFidelity";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::NonPositiveTime: return "NonPositiveTime";
    case ErrorKind::BadInterval: return "BadInterval";
    case ErrorKind::FOutOfRange: return "FOutOfRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidChannel: return "InvalidChannel";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qtec
