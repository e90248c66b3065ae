#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ippmm {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  NonSquareLength,
  AsymmetricInput,
  ConvergenceFailure,
  NotPositiveDefinite,
  SyntaxError,
  DuplicateEntry,
  IndexOutOfRange,
  RankDeficientDraw,
  InconsistentSystem,
  SingularSystem,
  SingularOperator,
  DimensionTooLarge,
  MaxKrylovIterations,
  StepTooSmall,
  Infeasible,
  Unbounded,
  IoError,
};

inline constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonSquareLength: return "NonSquareLength";
    case Errc::AsymmetricInput: return "AsymmetricInput";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::RankDeficientDraw: return "RankDeficientDraw";
    case Errc::InconsistentSystem: return "InconsistentSystem";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::SingularOperator: return "SingularOperator";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::MaxKrylovIterations: return "MaxKrylovIterations";
    case Errc::StepTooSmall: return "StepTooSmall";
    case Errc::Infeasible: return "Infeasible";
    case Errc::Unbounded: return "Unbounded";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure the library reports. The code is the
/// machine-readable part; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// SDPA parse failure. line() is 1-based; 0 means "end of input".
class SyntaxError : public Error {
 public:
  SyntaxError(int line, const std::string& reason)
      : Error(Errc::SyntaxError, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  int line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  int line_;
  std::string reason_;
};

}  // namespace ippmm
