#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fmb {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  DegenerateCircuit,
  EmptyDesign,
  UnsupportedDimension,
  NoEdges,
  BadBenchmarkDepth,
  DensityInfeasible,
  NotDefiniteOutcome,
  IncompleteNoiseModel,
  DegenerateReference,
  NumericalFailure,
  EpDivergence,
  EpNotConverged,
  MissingData,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries a machine-readable code so the
/// CLI can map it onto an exit status and record-level error entries.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateCircuit: return "DegenerateCircuit";
    case ErrorCode::EmptyDesign: return "EmptyDesign";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::BadBenchmarkDepth: return "BadBenchmarkDepth";
    case ErrorCode::DensityInfeasible: return "DensityInfeasible";
    case ErrorCode::NotDefiniteOutcome: return "NotDefiniteOutcome";
    case ErrorCode::IncompleteNoiseModel: return "IncompleteNoiseModel";
    case ErrorCode::DegenerateReference: return "DegenerateReference";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EpDivergence: return "EpDivergence";
    case ErrorCode::EpNotConverged: return "EpNotConverged";
    case ErrorCode::MissingData: return "MissingData";
  }
  return "Unknown";
}

}  // namespace fmb
