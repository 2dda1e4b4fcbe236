#pragma once

#include <optional>
#include <string>
#include <utility>

#include "drro/common.hpp"
#include "drro/spectral.hpp"

namespace drro {

/// P(z) = p_0 + sum_{k=1}^m p_k (z^k + z^{-k}), real on the unit circle.
struct TrigPolynomial {
  Vector coeffs;  // p_0 .. p_m

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double Evaluate(double omega) const;
  double Evaluate(Complex z) const { return Evaluate(std::arg(z)); }
  Vector Evaluate(const FrequencyGrid& grid) const;
};

/// P/Q with the normalization q_0 = 1.
struct RationalSpectrum {
  TrigPolynomial P;
  TrigPolynomial Q;
  double epsilon = 0.0;  // achieved max |P/Q - N| on the fitting grid
  int degree = 0;

  double Evaluate(Complex z) const { return P.Evaluate(z) / Q.Evaluate(z); }
};

/// L(z) = sum_k l_k z^{-k} with every root strictly inside the unit disk.
struct PolynomialFactor {
  Vector coeffs;  // l_0 .. l_m, l_0 > 0
  CVector roots;  // zeros of z^m L(z)

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Complex Evaluate(Complex z) const;
};

struct RationalFitOptions {
  double delta = -1.0;       // positivity margin; negative means 1e-6 * median(N)
  double relative_tol = 1e-3;  // eps bisection tolerance, relative to the bracket
  double lp_tol = 1e-9;
  int max_pivots = 200000;
};

/// Resolves the default margin for the given samples.
double PositivityMargin(const SpectrumSamples& N, const RationalFitOptions& options);

/// Searches (P, Q) of degree m with |P - N Q| <= eps Q, P >= delta, Q >= delta,
/// q_0 = 1 at every grid frequency. Returns nullopt when infeasible.
std::optional<RationalSpectrum> FeasibilityCheck(const SpectrumSamples& N, int m, double eps,
                                                 double delta,
                                                 const RationalFitOptions& options = {});

/// Smallest feasible eps for degree m by bisection over [0, max N - min N].
RationalSpectrum BestEpsilon(const SpectrumSamples& N, int m,
                             const RationalFitOptions& options = {});

/// Smallest degree in [0, max_degree] whose feasibility check passes at eps.
std::optional<RationalSpectrum> LowestDegree(const SpectrumSamples& N, double eps,
                                             int max_degree,
                                             const RationalFitOptions& options = {});

/// Canonical factor of a positive trigonometric polynomial from the roots of
/// z^m P(z) (balanced companion eigenvalues). Throws kRootOnCircle when a
/// root lies within 1e-7 of the unit circle, kNonPositiveSpectrum when P is
/// not positive.
PolynomialFactor FactorPolynomial(const TrigPolynomial& P);

/// |L(z)|^2 as a trigonometric polynomial: p_k = sum_j l_j l_{j+k}.
TrigPolynomial Expand(const PolynomialFactor& L);

/// Canonical factors (S_P, S_Q) with L~ = S_P / S_Q.
std::pair<PolynomialFactor, PolynomialFactor> RationalFactor(const RationalSpectrum& spec);

/// Searches a positive semidefinite Gram matrix G with diagonal sums p_k by
/// alternating projections. Validation aid for small degrees; returns
/// nullopt if no certificate is found within the iteration budget.
std::optional<Matrix> GramCertificate(const TrigPolynomial& P, int max_iterations = 20000,
                                      double tol = 1e-9);

std::string RationalSpectrumToJson(const RationalSpectrum& spec);
RationalSpectrum RationalSpectrumFromJson(const std::string& text);

}  // namespace drro
