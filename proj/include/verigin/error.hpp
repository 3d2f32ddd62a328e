// error.hpp
#ifndef VERIGIN_ERROR_HPP
#define VERIGIN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace verigin {

enum class ErrorKind {
  DensityOutOfRange,
  PressureOutOfRange,
  NoConvergence,
  NonMonotoneDrag,
  GeometryDegenerate,
  DensityJumpVanishes,
  DegenerateEquilibrium,
  SingularSystem,
  EigensolverFailure,
  BranchCut,
  NewtonDiverged,
  EventTriggered,
  ParseError,
  ValidationError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DensityOutOfRange: return "DensityOutOfRange";
    case ErrorKind::PressureOutOfRange: return "PressureOutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonMonotoneDrag: return "NonMonotoneDrag";
    case ErrorKind::GeometryDegenerate: return "GeometryDegenerate";
    case ErrorKind::DensityJumpVanishes: return "DensityJumpVanishes";
    case ErrorKind::DegenerateEquilibrium: return "DegenerateEquilibrium";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::EventTriggered: return "EventTriggered";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace verigin

#endif  // VERIGIN_ERROR_HPP
