#pragma once

#include <iosfwd>
#include <vector>

#include "drro/common.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

/// The N-th roots of unity z_n = exp(j 2 pi n / N), N a power of two.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int size);

  int size() const { return size_; }
  double angle(int n) const;
  Complex point(int n) const;
  std::vector<Complex> points() const;

  bool operator==(const FrequencyGrid& other) const = default;

 private:
  int size_;
};

/// Positive scalar density sampled on a grid.
struct SpectrumSamples {
  FrequencyGrid grid;
  Vector values;

  SpectrumSamples(FrequencyGrid g, Vector v);
  static SpectrumSamples Constant(FrequencyGrid g, double c);

  /// Strict positivity and values[n] == values[N-n] (relative `tol`).
  bool IsValid(double tol = 1e-9) const;
  /// Grid average, i.e. the trace of the Toeplitz operator.
  double Mean() const { return values.mean(); }
};

/// Samples of the causal canonical factor L of a spectrum, plus the
/// cepstral coefficients used to produce them.
struct FactorSamples {
  FrequencyGrid grid;
  CVector values;
  Vector cepstrum;  // lambda_0 .. lambda_{N/2}

  /// |lambda_{N/2}|, the Nyquist cepstral tail used as the aliasing proxy.
  double NyquistTail() const;
  /// Tail above 1e-6 * max(1, |lambda_0|): the grid is too coarse.
  bool Aliasing() const;

  /// Off-grid evaluation of the same cepstral model. Agrees with `values`
  /// on the grid; |L(z)|^2 is the exponential of the trigonometric
  /// interpolant of log M.
  Complex Evaluate(Complex z) const;
};

/// Cepstral (DFT) spectral factorization of a scalar density. Throws
/// kNonPositiveSpectrum if any sample is below `min_value`.
FactorSamples SpectralFactorDft(const SpectrumSamples& spectrum, double min_value = 1e-12);

/// Precomputed resolvent data on a grid for the transformed triple:
///   rb[n] = (I - z_n Abar)^{-1} Bbar,   cr[n] = Cbar (I - z_n Abar)^{-1}.
class ResolventTable {
 public:
  ResolventTable(const RiccatiData& ricc, const FrequencyGrid& grid);

  const FrequencyGrid& grid() const { return grid_; }
  const CVector& rb(int n) const { return rb_[static_cast<size_t>(n)]; }
  const CMatrix& cr(int n) const { return cr_[static_cast<size_t>(n)]; }

 private:
  FrequencyGrid grid_;
  std::vector<CVector> rb_;
  std::vector<CMatrix> cr_;
};

/// Trapezoid rule for Gamma = (1/2pi) int (I - z Abar)^{-1} Bbar L(z) dw.
CVector ComputeGamma(const FactorSamples& factor, const RiccatiData& ricc);
CVector ComputeGamma(const FactorSamples& factor, const ResolventTable& table);

/// S(z) = {T L}_-(z) = Cbar (z^{-1} I - Abar)^{-1} Gamma.
CVector AnticausalPartTL(const CVector& gamma, const RiccatiData& ricc, Complex z);

/// CSV records "index,value" with a header line.
void WriteSpectrumCsv(std::ostream& out, const SpectrumSamples& spectrum);
SpectrumSamples ReadSpectrumCsv(std::istream& in);

}  // namespace drro
