#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace floqryd {

enum class ErrorCode {
  // qdyn-core
  DimensionMismatch,
  NotHermitian,
  NotUnitary,
  NoBracket,
  // system-model
  IndexOutOfRange,
  SameAtom,
  InvalidConfig,
  // drive-schedules
  TimeOutOfSegment,
  TimeOutOfSchedule,
  NoSolution,
  // hamiltonian
  TruncationTooSmall,
  // lindblad-evolver
  UnsupportedAtomCount,
  StepSizeUnderflow,
  InvalidInitialState,
  PositivityViolation,
  TraceDrift,
  WindowOutOfRange,
  // floquet-analysis
  DissipativeScheduleUnsupported,
  ZeroOverlap,
  // observables
  NotNormalized,
  // analysis-fitting
  InsufficientData,
  NoConvergence,
  // calibration-models
  FrequencyOutOfBand,
  TargetUnreachable,
  InsufficientSamples,
  NoImprovement,
  // scenario
  Validation,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure carries a code so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace floqryd
