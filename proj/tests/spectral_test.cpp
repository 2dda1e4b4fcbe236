#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "drro/spectral.hpp"
#include "drro/sysmodel.hpp"
#include "test_models.hpp"

namespace drro {
namespace {

// Monic polynomial in z^{-1} from its roots.
std::vector<Complex> FromRoots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{1.0};
  for (const Complex& r : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] -= r * c[k];
    }
    c = next;
  }
  return c;
}

Complex EvalInvPoly(const std::vector<Complex>& c, Complex z) {
  Complex acc = 0.0, zk = 1.0;
  for (const Complex& ck : c) {
    acc += ck * zk;
    zk /= z;
  }
  return acc;
}

struct RationalCase {
  std::vector<Complex> zeros;
  std::vector<Complex> poles;
  double gain;
};

void PrintTo(const RationalCase& c, std::ostream* os) {
  *os << c.zeros.size() << " zeros, " << c.poles.size() << " poles";
}

class FactorRoundTrip : public ::testing::TestWithParam<RationalCase> {};

TEST_P(FactorRoundTrip, RecoversMinimumPhaseFactor) {
  const RationalCase& rc = GetParam();
  const auto b = FromRoots(rc.zeros);
  const auto a = FromRoots(rc.poles);
  const FrequencyGrid grid(1024);
  Vector m(grid.size());
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    m(n) = rc.gain * rc.gain * std::norm(EvalInvPoly(b, z) / EvalInvPoly(a, z));
  }
  const FactorSamples f = SpectralFactorDft(SpectrumSamples(grid, m));
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    EXPECT_NEAR(std::norm(f.values(n)), m(n), 1e-8 * m(n));
    // The canonical factor is the minimum-phase one, gain * b / a.
    const Complex expected = rc.gain * EvalInvPoly(b, z) / EvalInvPoly(a, z);
    EXPECT_LT(std::abs(f.values(n) - expected), 1e-8 * std::abs(expected));
  }
  EXPECT_FALSE(f.Aliasing());
}

INSTANTIATE_TEST_SUITE_P(
    DegreeUpToFour, FactorRoundTrip,
    ::testing::Values(RationalCase{{0.5}, {}, 1.0}, RationalCase{{}, {0.7}, 2.0},
                      RationalCase{{-0.3, 0.6}, {0.8}, 0.5},
                      RationalCase{{Complex(0.4, 0.5), Complex(0.4, -0.5)},
                                   {Complex(-0.6, 0.3), Complex(-0.6, -0.3)}, 1.5},
                      RationalCase{{0.2, -0.7, Complex(0.1, 0.6), Complex(0.1, -0.6)},
                                   {0.5, -0.4, Complex(0.7, 0.2), Complex(0.7, -0.2)}, 3.0}),
    [](const ::testing::TestParamInfo<RationalCase>& info) {
      return "Case" + std::to_string(info.index);
    });

TEST(SpectralFactorDft, OffGridEvaluationMatches) {
  const FrequencyGrid grid(1024);
  Vector m(grid.size());
  for (int n = 0; n < grid.size(); ++n) m(n) = std::norm(1.0 - 0.5 / grid.point(n));
  const FactorSamples f = SpectralFactorDft(SpectrumSamples(grid, m));
  for (double w : {0.1, 1.0, 2.5, 3.1}) {
    const Complex z = std::polar(1.0, w);
    EXPECT_LT(std::abs(f.Evaluate(z) - (1.0 - 0.5 / z)), 1e-10);
  }
  EXPECT_LT(std::abs(f.Evaluate(grid.point(7)) - f.values(7)), 1e-12);
}

TEST(SpectralFactorDft, RejectsNonPositive) {
  const FrequencyGrid grid(8);
  Vector m = Vector::Ones(8);
  m(3) = 0.0;
  try {
    SpectralFactorDft(SpectrumSamples(grid, m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveSpectrum);
  }
}

TEST(SpectralFactorDft, FlagsAliasingOnCoarseGrid) {
  const FrequencyGrid grid(8);
  Vector m(8);
  for (int n = 0; n < 8; ++n) m(n) = std::norm(1.0 - 0.99 / grid.point(n));
  EXPECT_TRUE(SpectralFactorDft(SpectrumSamples(grid, m)).Aliasing());
}

TEST(FrequencyGrid, RequiresPowerOfTwo) {
  EXPECT_THROW(FrequencyGrid(12), Error);
  EXPECT_NO_THROW(FrequencyGrid(16));
}

TEST(ComputeGamma, FirFactorMatchesAnalytic) {
  // For L = sum_k l_k z^{-k}, Gamma = sum_k l_k Abar^k Bbar.
  const StateSpaceModel model = test::Ac15();
  const RiccatiData ricc = SolveDare(model);
  const std::vector<double> l{1.3, -0.4, 0.2};
  const FrequencyGrid grid(1024);
  Vector m(grid.size());
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    m(n) = std::norm(l[0] + l[1] / z + l[2] / (z * z));
  }
  const FactorSamples f = SpectralFactorDft(SpectrumSamples(grid, m));
  const CVector gamma = ComputeGamma(f, ricc);
  const Vector expected =
      l[0] * ricc.Bbar + l[1] * ricc.Abar * ricc.Bbar + l[2] * ricc.Abar * ricc.Abar * ricc.Bbar;
  EXPECT_LT((gamma - expected.cast<Complex>()).norm(), 1e-10 * expected.norm());
}

TEST(ComputeGamma, WhiteFactorGivesBbar) {
  const RiccatiData ricc = SolveDare(test::ScalarModel());
  const FrequencyGrid grid(64);
  const FactorSamples f = SpectralFactorDft(SpectrumSamples::Constant(grid, 1.0));
  EXPECT_NEAR(std::abs(ComputeGamma(f, ricc)(0) - ricc.Bbar(0, 0)), 0.0, 1e-14);
}

TEST(SpectrumCsv, RoundTrip) {
  const FrequencyGrid grid(16);
  Vector v(16);
  for (int n = 0; n < 16; ++n) v(n) = 1.0 + 0.1 * std::cos(grid.angle(n)) + 1e-17 * n;
  std::stringstream ss;
  WriteSpectrumCsv(ss, SpectrumSamples(grid, v));
  const SpectrumSamples back = ReadSpectrumCsv(ss);
  EXPECT_EQ(back.grid.size(), 16);
  EXPECT_EQ((back.values - v).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SpectrumSamples, Validity) {
  const FrequencyGrid grid(8);
  Vector v = Vector::Ones(8);
  EXPECT_TRUE(SpectrumSamples(grid, v).IsValid());
  v(1) = 2.0;
  EXPECT_FALSE(SpectrumSamples(grid, v).IsValid());
  EXPECT_THROW(SpectrumSamples(grid, Vector::Ones(7)), Error);
}

}  // namespace
}  // namespace drro
