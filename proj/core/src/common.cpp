#include "drro/common.hpp"

namespace drro {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kModelRejected: return "ModelRejected";
    case ErrorCode::kNonConvergent: return "NonConvergent";
    case ErrorCode::kNotStabilizing: return "NotStabilizing";
    case ErrorCode::kSingularResolvent: return "SingularResolvent";
    case ErrorCode::kNonPositiveSpectrum: return "NonPositiveSpectrum";
    case ErrorCode::kDivisionNearZero: return "DivisionNearZero";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kLyapunovFailure: return "LyapunovFailure";
    case ErrorCode::kSolverStall: return "SolverStall";
    case ErrorCode::kRootOnCircle: return "RootOnCircle";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kMemoryGuard: return "MemoryGuard";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

void Throw(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(ToString(code)) + ": " + message);
}

}  // namespace drro
