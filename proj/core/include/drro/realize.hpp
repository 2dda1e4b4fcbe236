#pragma once

#include <filesystem>

#include "drro/common.hpp"
#include "drro/ratapprox.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

/// L~(z) = (1 + Ctil (zI - Atil)^{-1} Btil) Dtil^{1/2} in controllable
/// canonical form.
struct FactorRealization {
  Matrix Atil;
  Matrix Btil;
  Matrix Ctil;
  double Dtil = 1.0;

  int order() const { return static_cast<int>(Atil.rows()); }
  Complex Evaluate(Complex z) const;
};

/// Realizes S_P / S_Q. Throws kDegenerateDenominator if the leading
/// coefficient of the denominator is (numerically) zero.
FactorRealization RealizeFactor(const PolynomialFactor& num, const PolynomialFactor& den);

/// The constant factor L~ = 1 (empty state).
FactorRealization TrivialFactor();

/// U = A_k' P Bw Ctil + A_k' U Atil by Kronecker unfolding.
Matrix SolveLyapunovU(const StateSpaceModel& model, const RiccatiData& ricc,
                      const FactorRealization& fac);

/// x_{t+1} = F x_t + G w_t,  u_t = H x_t + J w_t.
/// When plant_states > 0 the trailing plant_states controller states
/// reproduce the plant state exactly; interconnections substitute the
/// measured plant state for them.
struct RealizedController {
  Matrix F;
  Matrix G;
  Matrix H;
  Matrix J;
  int plant_states = 0;

  int order() const { return static_cast<int>(F.rows()); }
  /// H (zI - F)^{-1} G + J.
  CMatrix Evaluate(Complex z) const;
};

RealizedController AssembleController(const StateSpaceModel& model, const RiccatiData& ricc,
                                      const FactorRealization& fac, const Matrix& U);

/// Convenience: factor realization, U, and assembly.
RealizedController RealizeRationalController(const StateSpaceModel& model,
                                             const RiccatiData& ricc,
                                             const FactorRealization& fac);

/// The H2 controller Delta^{-1} U, i.e. the assembly at L~ = 1.
RealizedController RealizeH2(const StateSpaceModel& model, const RiccatiData& ricc);

/// Gamma~ = (1/2pi) int (I - z Abar)^{-1} Bbar L~(z) dw in closed form,
/// sqrt(Dtil) (Bbar + A_k' U Btil).
CVector FactorGamma(const RiccatiData& ricc, const FactorRealization& fac, const Matrix& U);

/// Frequency-domain controller K0 - Delta^{-1} {T L~}_- / L~ at z.
CMatrix EvalRationalController(const StateSpaceModel& model, const RiccatiData& ricc,
                               const FactorRealization& fac, const CVector& gamma, Complex z);

struct ClosedLoopReport {
  Matrix A_cl;
  double spectral_radius = 0.0;
  bool stable = false;  // spectral_radius < 1 - 1e-9
};

/// Interconnection of the plant with a disturbance-feedback controller.
ClosedLoopReport ClosedLoopCheck(const StateSpaceModel& model, const RealizedController& ctrl);

void SaveController(const std::filesystem::path& path, const RealizedController& ctrl);
RealizedController LoadController(const std::filesystem::path& path);

}  // namespace drro
