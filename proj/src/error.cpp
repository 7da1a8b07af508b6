#include "floqryd/error.hpp"

namespace floqryd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SameAtom: return "SameAtom";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TimeOutOfSegment: return "TimeOutOfSegment";
    case ErrorCode::TimeOutOfSchedule: return "TimeOutOfSchedule";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::UnsupportedAtomCount: return "UnsupportedAtomCount";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::InvalidInitialState: return "InvalidInitialState";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::TraceDrift: return "TraceDrift";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::DissipativeScheduleUnsupported: return "DissipativeScheduleUnsupported";
    case ErrorCode::ZeroOverlap: return "ZeroOverlap";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::FrequencyOutOfBand: return "FrequencyOutOfBand";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NoImprovement: return "NoImprovement";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace floqryd
