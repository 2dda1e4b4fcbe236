#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace drro {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Failure categories raised by the library. Each maps onto one of the
/// documented error conditions of the public operations.
enum class ErrorCode {
  kInvalidArgument,
  kModelRejected,
  kNonConvergent,
  kNotStabilizing,
  kSingularResolvent,
  kNonPositiveSpectrum,
  kDivisionNearZero,
  kBracketFailure,
  kLyapunovFailure,
  kSolverStall,
  kRootOnCircle,
  kDegenerateDenominator,
  kIllConditioned,
  kMemoryGuard,
  kIo,
};

const char* ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string& message);

inline void Require(bool condition, const std::string& message) {
  if (!condition) Throw(ErrorCode::kInvalidArgument, message);
}

}  // namespace drro
