#pragma once

#include <string>
#include <vector>

#include "drro/common.hpp"

namespace drro {

/// Discrete-time plant x' = A x + Bu u + Bw w, s = C x with a scalar
/// disturbance channel and unit control weight.
struct StateSpaceModel {
  Matrix A;
  Matrix Bu;
  Matrix Bw;
  Matrix C;

  /// Checks shapes only (square A, matching row counts, one disturbance
  /// column). Structural assumptions are checked by CheckAssumptions.
  static StateSpaceModel Create(Matrix A, Matrix Bu, Matrix Bw, Matrix C);

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(Bu.cols()); }
  int ns() const { return static_cast<int>(C.rows()); }
};

/// Folds a positive-definite control weight R into Bu (Bu <- Bu R^{-1/2}) so
/// that the remaining problem has R = I. Inputs of the folded model relate to
/// physical inputs by u_phys = R^{-1/2} u.
StateSpaceModel FoldControlWeight(const StateSpaceModel& model, const Matrix& R);

struct AssumptionReport {
  bool stabilizable = true;             // (A, Bu)
  bool disturbance_controllable = true; // (A, Bw)
  bool observable = true;               // (A, C)
  std::vector<std::string> failures;    // names of the failing rank tests

  bool ok() const { return failures.empty(); }
};

/// PBH eigenvector rank tests with relative tolerance `tol`.
AssumptionReport CheckAssumptions(const StateSpaceModel& model, double tol = 1e-8);

/// Throws kModelRejected naming every failed rank test.
void RequireAssumptions(const StateSpaceModel& model, double tol = 1e-8);

struct RiccatiData {
  Matrix P;      // stabilizing DARE solution
  Matrix K_lqr;  // (I + Bu'PBu)^{-1} Bu'PA
  Matrix A_k;    // A - Bu K_lqr
  Matrix Rbar;   // (I + Bu'PBu)^{-1/2}
  Matrix Abar;   // A_k'
  Matrix Bbar;   // A_k' P Bw
  Matrix Cbar;   // -Rbar Bu'
  int iterations = 0;
  double residual = 0.0;  // relative DARE residual
};

/// Riccati recursion from P0 = C'C until the relative change drops below
/// `tol`. Throws kNonConvergent / kNotStabilizing.
RiccatiData SolveDare(const StateSpaceModel& model, double tol = 1e-12,
                      int max_iterations = 100000);

/// Relative residual of P against the DARE right-hand side.
double DareResidual(const StateSpaceModel& model, const Matrix& P);

// Pointwise transfer evaluations on the unit circle. All throw
// kSingularResolvent when the relevant resolvent is numerically singular.

CMatrix EvalF(const StateSpaceModel& model, Complex z);  // C (zI-A)^{-1} Bu
CMatrix EvalG(const StateSpaceModel& model, Complex z);  // C (zI-A)^{-1} Bw

/// Non-causal controller K0(z) = -(I + F*F)^{-1} F* G.
CMatrix EvalNoncausalK0(const StateSpaceModel& model, Complex z);

struct TransferSplit {
  CMatrix T;  // strictly anticausal part of Delta K0
  CMatrix U;  // causal part of Delta K0
};

TransferSplit EvalSplitTU(const StateSpaceModel& model, const RiccatiData& ricc, Complex z);

struct DeltaPair {
  CMatrix delta;
  CMatrix delta_inv;
};

/// Canonical factor of I + F*F: Delta = Rbar^{-1}(I + K_lqr (zI-A)^{-1} Bu).
DeltaPair EvalDelta(const StateSpaceModel& model, const RiccatiData& ricc, Complex z);

/// K_H2(z) = Delta(z)^{-1} U(z).
CMatrix EvalH2(const StateSpaceModel& model, const RiccatiData& ricc, Complex z);

}  // namespace drro
