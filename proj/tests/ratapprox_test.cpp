#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "drro/ratapprox.hpp"

namespace drro {
namespace {

TrigPolynomial Trig(std::initializer_list<double> c) {
  TrigPolynomial p;
  p.coeffs = Vector(static_cast<Eigen::Index>(c.size()));
  int i = 0;
  for (double v : c) p.coeffs(i++) = v;
  return p;
}

SpectrumSamples Sample(const FrequencyGrid& grid, const std::function<double(double)>& f) {
  Vector v(grid.size());
  for (int n = 0; n < grid.size(); ++n) v(n) = f(grid.angle(n));
  return SpectrumSamples(grid, v);
}

TEST(TrigPolynomial, Evaluate) {
  const TrigPolynomial p = Trig({2.0, 0.5, -0.25});
  for (double w : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR(p.Evaluate(w), 2.0 + 1.0 * std::cos(w) - 0.5 * std::cos(2 * w), 1e-14);
  }
}

TEST(BestEpsilon, DegreeZeroIsMidrange) {
  const FrequencyGrid grid(256);
  const SpectrumSamples N = Sample(grid, [](double w) { return 3.0 + std::cos(w) + 0.3 * std::cos(3 * w); });
  const double range = N.values.maxCoeff() - N.values.minCoeff();
  const RationalSpectrum fit = BestEpsilon(N, 0);
  EXPECT_NEAR(fit.epsilon, range / 2, 2e-3 * range);
  EXPECT_EQ(fit.degree, 0);
}

TEST(BestEpsilon, RecoversExactRational) {
  const TrigPolynomial P = Trig({2.0, 0.6, 0.1});
  const TrigPolynomial Q = Trig({1.0, -0.4});
  const FrequencyGrid grid(512);
  const SpectrumSamples N = Sample(grid, [&](double w) { return P.Evaluate(w) / Q.Evaluate(w); });
  const double range = N.values.maxCoeff() - N.values.minCoeff();
  const RationalSpectrum fit = BestEpsilon(N, 2);
  EXPECT_LT(fit.epsilon, 2e-3 * range);
  for (int n = 0; n < grid.size(); ++n) {
    EXPECT_NEAR(fit.Evaluate(grid.point(n)), N.values(n), fit.epsilon * (1 + 1e-9) + 1e-12);
    EXPECT_GT(fit.Q.Evaluate(grid.angle(n)), 0.0);
    EXPECT_GT(fit.P.Evaluate(grid.angle(n)), 0.0);
  }
  EXPECT_NEAR(fit.Q.coeffs(0), 1.0, 1e-12);
}

TEST(BestEpsilon, DecreasesWithDegree) {
  const FrequencyGrid grid(256);
  const SpectrumSamples N = Sample(grid, [](double w) { return std::exp(std::cos(w)); });
  double previous = INFINITY;
  for (int m = 0; m <= 3; ++m) {
    const double eps = BestEpsilon(N, m).epsilon;
    EXPECT_LE(eps, previous * (1 + 1e-6));
    previous = eps;
  }
}

TEST(FeasibilityCheck, RejectsTooSmallEpsilon) {
  const FrequencyGrid grid(128);
  const SpectrumSamples N = Sample(grid, [](double w) { return 2.0 + std::cos(w); });
  EXPECT_FALSE(FeasibilityCheck(N, 0, 0.5, 1e-6).has_value());
  EXPECT_TRUE(FeasibilityCheck(N, 0, 1.0, 1e-6).has_value());
  EXPECT_TRUE(FeasibilityCheck(N, 1, 1e-6, 1e-6).has_value());
}

TEST(LowestDegree, FindsSmallestFeasibleDegree) {
  const FrequencyGrid grid(256);
  const SpectrumSamples N = Sample(grid, [](double w) { return 2.0 + std::cos(w) + 0.5 * std::cos(2 * w); });
  const auto fit = LowestDegree(N, 1e-6, 4);
  ASSERT_TRUE(fit.has_value());
  EXPECT_EQ(fit->degree, 2);
  EXPECT_FALSE(LowestDegree(N, 1e-9, 0).has_value());
}

TEST(PositivityMargin, DefaultsToMedianFraction) {
  const FrequencyGrid grid(8);
  const SpectrumSamples N(grid, (Vector(8) << 1, 2, 3, 4, 4, 3, 2, 1).finished());
  EXPECT_NEAR(PositivityMargin(N, {}), 1e-6 * 2.5, 1e-18);
  RationalFitOptions o;
  o.delta = 0.25;
  EXPECT_EQ(PositivityMargin(N, o), 0.25);
}

TEST(FactorPolynomial, RecoversCanonicalFactor) {
  // L = 2 (1 - 0.5 z^-1)(1 + 0.3 z^-1)(1 - 0.2 z^-1)
  PolynomialFactor L;
  L.coeffs = 2.0 * (Vector(4) << 1.0, -0.4, -0.11, 0.03).finished();
  const TrigPolynomial P = Expand(L);
  const PolynomialFactor back = FactorPolynomial(P);
  EXPECT_LT((back.coeffs - L.coeffs).norm(), 1e-10);
  EXPECT_LT(back.roots.cwiseAbs().maxCoeff(), 1.0);
  for (double w : {0.0, 1.0, 2.0}) {
    EXPECT_NEAR(std::norm(back.Evaluate(std::polar(1.0, w))), P.Evaluate(w), 1e-10 * P.Evaluate(w));
  }
}

TEST(FactorPolynomial, ComplexRootsAndReflection) {
  // Factor with one root outside the disk; the canonical factor reflects it.
  PolynomialFactor L;
  L.coeffs = (Vector(3) << 1.0, -1.0, 0.61).finished();  // roots 0.5 +- 0.6j
  const PolynomialFactor back = FactorPolynomial(Expand(L));
  EXPECT_LT((back.coeffs - L.coeffs).norm(), 1e-10);
  EXPECT_EQ(back.roots.size(), 2);
}

TEST(FactorPolynomial, RootOnCircle) {
  // |1 - z^-1|^2 = 2 - 2 cos w vanishes at w = 0.
  try {
    FactorPolynomial(Trig({2.0, -1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kRootOnCircle || e.code() == ErrorCode::kNonPositiveSpectrum);
  }
  EXPECT_THROW(FactorPolynomial(Trig({1.0, 1.0})), Error);  // negative at w = pi
}

TEST(RationalFactor, MatchesSpectrum) {
  RationalSpectrum spec;
  spec.P = Trig({2.0, 0.6, 0.1});
  spec.Q = Trig({1.0, -0.4});
  spec.degree = 2;
  const auto [num, den] = RationalFactor(spec);
  for (double w : {0.0, 0.9, 3.0}) {
    const Complex z = std::polar(1.0, w);
    EXPECT_NEAR(std::norm(num.Evaluate(z) / den.Evaluate(z)), spec.Evaluate(z), 1e-12);
  }
}

TEST(GramCertificate, PositivePolynomial) {
  const TrigPolynomial P = Trig({2.0, 0.6, 0.1});
  const auto G = GramCertificate(P);
  ASSERT_TRUE(G.has_value());
  Eigen::SelfAdjointEigenSolver<Matrix> es(*G);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
  for (int k = 0; k <= 2; ++k) EXPECT_NEAR(G->diagonal(k).sum(), P.coeffs(k), 1e-7);
  EXPECT_FALSE(GramCertificate(Trig({1.0, 1.0}), 2000).has_value());
}

TEST(RationalSpectrumJson, RoundTrip) {
  RationalSpectrum spec;
  spec.P = Trig({2.0, 0.6, 0.1 / 3});
  spec.Q = Trig({1.0, -0.4, 1e-17});
  spec.degree = 2;
  spec.epsilon = 0.123456789;
  const RationalSpectrum back = RationalSpectrumFromJson(RationalSpectrumToJson(spec));
  EXPECT_EQ(back.P.coeffs, spec.P.coeffs);
  EXPECT_EQ(back.Q.coeffs, spec.Q.coeffs);
  EXPECT_EQ(back.degree, 2);
  EXPECT_EQ(back.epsilon, spec.epsilon);
  EXPECT_THROW(RationalSpectrumFromJson("{\"P\": 3}"), Error);
}

}  // namespace
}  // namespace drro
