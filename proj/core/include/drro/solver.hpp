#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "drro/common.hpp"
#include "drro/spectral.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

/// Sentinel multiplier returned when the gradient vanishes identically; the
/// worst case is then the nominal density.
inline constexpr double kInfiniteGamma = std::numeric_limits<double>::infinity();

/// Finite parametrization of the optimal spectrum: the vector Gamma and the
/// multiplier gamma of the Wasserstein constraint.
struct GammaParameter {
  CVector Gamma;
  double gamma = kInfiniteGamma;

  bool degenerate() const { return !std::isfinite(gamma); }
};

struct SolverConfig {
  int grid_size = 4096;
  double tol = 1e-6;
  int max_iterations = 2000;
  bool record_trace = true;
};

struct IterationRecord {
  int k = 0;
  double objective = 0.0;
  double gap = 0.0;
  double gamma = 0.0;
  double step = 0.0;
};

/// Iterate M_k together with every quantity derived from it.
struct SolverState {
  int k = 0;
  SpectrumSamples M;
  FactorSamples L;
  GammaParameter param;
  Vector R;          // gradient density R_k on the grid
  Vector M_tilde;    // linear-subproblem solution (1 - R_k/gamma_k)^{-2}
  double objective = 0.0;  // Phi(M_k)
  double gap = 0.0;        // mean(R_k (M_tilde - M_k))
  double step = 0.0;       // eta_k = 2/(k+2)
};

struct SynthesisResult {
  GammaParameter param;
  SpectrumSamples M;
  FactorSamples L;
  double radius = 0.0;
  double regret = 0.0;     // Phi(M*) through the Lyapunov form
  int iterations = 0;
  double change = 0.0;     // last relative iterate change
  double residual = 0.0;   // max_z |M(z) - N*(z)| / N*(z)
  double bw_error = 0.0;   // |mean((sqrt(M)-1)^2) - r^2| / r^2
  bool converged = false;
  std::vector<IterationRecord> trace;
};

/// R(z) = ||Cbar (I - z Abar)^{-1} Gamma||^2 / |L(z)|^2. Throws
/// kDivisionNearZero when |L(z)| < 1e-10.
double GradientRk(const CVector& Gamma, Complex L, const RiccatiData& ricc, Complex z);

/// Gradient density on the factor's grid.
Vector GradientOnGrid(const CVector& Gamma, const FactorSamples& factor,
                      const ResolventTable& table);

/// Solves mean(((1 - R/gamma)^{-1} - 1)^2) = r^2 for gamma > max R.
/// Returns kInfiniteGamma when R vanishes identically.
double BisectGamma(const Vector& R, double r);

/// (1 - R/gamma)^{-2} pointwise, or ones for the infinite sentinel.
Vector WorstCaseDensity(const Vector& R, double gamma);

struct WorstCaseValue {
  double gamma = kInfiniteGamma;
  double value = 0.0;  // mean(R M~), the largest mean(R M) over the ball
};

/// Worst-case expected regret over the Bures-Wasserstein ball of radius r
/// around the white density, for an arbitrary regret density R.
WorstCaseValue WorstCaseForDensity(const Vector& R, double r);

/// Frank-Wolfe iteration for the saddle problem at radius r.
class FrankWolfeSolver {
 public:
  FrankWolfeSolver(const RiccatiData& ricc, FrequencyGrid grid, double radius);

  /// State at the white initial iterate M_0 = 1.
  SolverState Initial() const;
  /// All derived quantities at iterate M (iteration counter k).
  SolverState Evaluate(int k, SpectrumSamples M) const;
  /// M_{k+1} = (1 - eta_k) M_k + eta_k M~_k, evaluated.
  SolverState Step(const SolverState& state) const;

  /// Phi(M) = Gamma* X Gamma with X = Cbar'Cbar + Abar' X Abar.
  double Objective(const SpectrumSamples& M) const;
  double ObjectiveFromGamma(const CVector& Gamma) const;

  const ResolventTable& table() const { return table_; }
  const Matrix& lyapunov() const { return X_; }
  double radius() const { return radius_; }

 private:
  RiccatiData ricc_;
  FrequencyGrid grid_;
  double radius_;
  ResolventTable table_;
  Matrix X_;
};

/// Single step from `state` (builds the resolvent table on each call).
SolverState FrankWolfeStep(const SolverState& state, const RiccatiData& ricc, double r);

/// Runs the iteration until the relative grid change drops below tol or
/// max_iterations is reached (converged = false in that case).
SynthesisResult Synthesize(const StateSpaceModel& model, const RiccatiData& ricc, double r,
                           const SolverConfig& config = {});
/// Convenience overload solving the Riccati equation first.
SynthesisResult Synthesize(const StateSpaceModel& model, double r,
                           const SolverConfig& config = {});

/// N*(z) = 1/4 (1 + sqrt(1 + 4 ||Cbar (z^{-1}I - Abar)^{-1} Gamma||^2 / gamma))^2
/// at any point of the unit circle.
double EvalNstar(const GammaParameter& param, const RiccatiData& ricc, Complex z);

/// N* sampled on an arbitrary grid (e.g. finer than the solver grid).
SpectrumSamples SampleNstar(const GammaParameter& param, const RiccatiData& ricc,
                            const FrequencyGrid& grid);

/// Phi(M*) = Gamma* X Gamma, cross-checked against the grid average of
/// ||S(z)||^2 over `check_grid` (relative 1e-6). Throws kLyapunovFailure if
/// rho(Abar) >= 1 and kIllConditioned if the two evaluations disagree.
double WorstCaseRegret(const GammaParameter& param, const RiccatiData& ricc,
                       const FrequencyGrid& check_grid = FrequencyGrid(4096));

/// Optimal causal controller K*(z) = K0(z) - Delta(z)^{-1} S(z) / L(z).
CMatrix EvalDrroController(const StateSpaceModel& model, const RiccatiData& ricc,
                           const CVector& Gamma, Complex L, Complex z);

using TransferFunction = std::function<CMatrix(Complex)>;

/// Regret density ||Delta(z) (K(z) - K0(z))||^2 of a causal controller.
Vector ControllerRegretDensity(const StateSpaceModel& model, const RiccatiData& ricc,
                               const TransferFunction& K, const FrequencyGrid& grid);

/// Trace rows "k,objective,gap,gamma,step".
void WriteTraceCsv(std::ostream& out, const std::vector<IterationRecord>& trace);

}  // namespace drro
