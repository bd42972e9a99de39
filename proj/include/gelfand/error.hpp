#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

enum class ErrorCode {
  NotSquare,
  NotHermitian,
  NoConvergence,
  NotCommuting,
  NotNormal,
  Singular,
  DiagonalNotSemisimple,
  CornerDimensionExceedsOne,
  HolonomyViolation,
  BimoduleAxiomViolation,
  InvalidCategory,
  InvalidSpaceoid,
  InvalidMorphism,
  InvalidFunctor,
  DegenerateFunctor,
  EndpointMismatch,
  Schema,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DiagonalNotSemisimple: return "DiagonalNotSemisimple";
    case ErrorCode::CornerDimensionExceedsOne: return "CornerDimensionExceedsOne";
    case ErrorCode::HolonomyViolation: return "HolonomyViolation";
    case ErrorCode::BimoduleAxiomViolation: return "BimoduleAxiomViolation";
    case ErrorCode::InvalidCategory: return "InvalidCategory";
    case ErrorCode::InvalidSpaceoid: return "InvalidSpaceoid";
    case ErrorCode::InvalidMorphism: return "InvalidMorphism";
    case ErrorCode::InvalidFunctor: return "InvalidFunctor";
    case ErrorCode::DegenerateFunctor: return "DegenerateFunctor";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

/// Every fault raised by the library carries one of the codes above so the CLI
/// can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gelfand
