#pragma once

#include "drro/common.hpp"
#include "drro/realize.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

/// Dense operators over a horizon of T steps: s = F u + G w, stacked by
/// time (block row t holds step t).
struct FiniteHorizonOperators {
  int T = 0;
  int nu = 0;
  int ns = 0;
  Matrix F;      // (T ns) x (T nu), block (i,j) = C A^{i-j-1} Bu for i > j
  Matrix G;      // (T ns) x T, same with Bw
  Matrix K0;     // -(I + F'F)^{-1} F'G
  Matrix Delta;  // block-lower-triangular, Delta' Delta = I + F'F
  Matrix DeltaK0;  // Delta K0, formed without cancellation
};

/// Throws kMemoryGuard when T * max(nx, nu, ns) exceeds `max_dimension`.
FiniteHorizonOperators BuildFiniteOperators(const StateSpaceModel& model, int T,
                                            int max_dimension = 4096);

/// Stacked free response O = [C; CA; ...; C A^{T-1}] of the output.
Matrix ObservabilityStack(const StateSpaceModel& model, int T);

struct FiniteRegret {
  double regret = 0.0;      // gamma tr((I - R/gamma)^{-1} - I) + gamma T r^2
  double gamma = 0.0;       // kInfiniteGamma when R_K = 0
  Matrix worst_covariance;  // (I - R/gamma)^{-2}
};

/// Worst-case expected regret of a dense causal controller over the
/// Bures-Wasserstein ball of radius r sqrt(T) around the identity.
FiniteRegret FiniteDualRegret(const FiniteHorizonOperators& ops, const Matrix& K, double r);

/// Keeps, in block row t, only the columns 0..t.
Matrix CausalPart(const Matrix& X, int block_rows);

/// Delta^{-1} causal(Delta K0 L) L^{-1}: the best causal controller for the
/// disturbance covariance L L'.
Matrix WienerHopfController(const FiniteHorizonOperators& ops, const Matrix& L);

/// Finite-horizon H2 controller (Wiener-Hopf at L = I).
Matrix FiniteH2Controller(const FiniteHorizonOperators& ops);

/// Block-Toeplitz matrix of the controller's impulse response over T steps.
Matrix ToeplitzFromController(const RealizedController& ctrl, int T);

struct FiniteOracleOptions {
  double tol = 1e-7;
  int max_iterations = 2000;
};

struct FiniteOracleResult {
  Matrix M;           // worst-case covariance M_T*
  Matrix K;           // saddle-point controller
  double regret = 0.0;  // tr(R_K M) over the horizon
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dense Frank-Wolfe on sup_M inf_K tr(R_K M) over BW(M, I) <= r sqrt(T).
FiniteOracleResult FiniteFwOracle(const FiniteHorizonOperators& ops, double r,
                                  const FiniteOracleOptions& options = {});

}  // namespace drro
