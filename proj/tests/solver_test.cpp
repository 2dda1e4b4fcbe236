#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "drro/solver.hpp"
#include "drro/spectral.hpp"
#include "test_models.hpp"

namespace drro {
namespace {

// Brute-force worst case for a two-level density: sqrt(M) = 1 + a on the
// first half and 1 + b on the second with (a^2 + b^2)/2 = r^2.
double TwoLevelBruteForce(double c1, double c2, double r) {
  double best = 0.0;
  const int steps = 200000;
  for (int i = 0; i <= steps; ++i) {
    const double t = 2.0 * std::numbers::pi * i / steps;
    const double a = std::sqrt(2.0) * r * std::cos(t), b = std::sqrt(2.0) * r * std::sin(t);
    best = std::max(best, 0.5 * (c1 * (1 + a) * (1 + a) + c2 * (1 + b) * (1 + b)));
  }
  return best;
}

TEST(BisectGamma, ConstantDensity) {
  for (double c : {0.3, 2.0}) {
    for (double r : {0.1, 1.0, 5.0}) {
      const Vector R = Vector::Constant(64, c);
      EXPECT_NEAR(BisectGamma(R, r), c * (1 + r) / r, 1e-9 * c * (1 + r) / r);
      EXPECT_NEAR(WorstCaseForDensity(R, r).value, c * (1 + r) * (1 + r), 1e-8 * c * (1 + r) * (1 + r));
    }
  }
}

TEST(BisectGamma, ZeroDensityIsDegenerate) {
  EXPECT_TRUE(std::isinf(BisectGamma(Vector::Zero(16), 1.0)));
  const WorstCaseValue v = WorstCaseForDensity(Vector::Zero(16), 1.0);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(WorstCaseDensity(Vector::Zero(4), kInfiniteGamma), Vector::Ones(4));
}

TEST(BisectGamma, RejectsBadRadius) {
  EXPECT_THROW(BisectGamma(Vector::Ones(4), 0.0), Error);
  EXPECT_THROW(BisectGamma(Vector::Ones(4), -1.0), Error);
}

TEST(WorstCaseForDensity, TwoLevelMatchesBruteForce) {
  Vector R(64);
  R.head(32).setConstant(1.0);
  R.tail(32).setConstant(3.0);
  for (double r : {0.2, 1.0, 2.5}) {
    const WorstCaseValue v = WorstCaseForDensity(R, r);
    EXPECT_NEAR(v.value, TwoLevelBruteForce(1.0, 3.0, r), 1e-6 * v.value);
    const Vector M = WorstCaseDensity(R, v.gamma);
    EXPECT_NEAR((M.array().sqrt() - 1.0).square().mean(), r * r, 1e-8 * r * r);
  }
}

class ScalarSynthesis : public ::testing::Test {
 protected:
  StateSpaceModel model = test::ScalarModel();
  RiccatiData ricc = SolveDare(model);
  SolverConfig config = [] {
    SolverConfig c;
    c.grid_size = 1024;
    c.tol = 1e-9;
    c.max_iterations = 20000;
    return c;
  }();
};

TEST_F(ScalarSynthesis, ConvergesWithConsistentCertificates) {
  const SynthesisResult res = Synthesize(model, ricc, 1.0, config);
  EXPECT_TRUE(res.converged);
  EXPECT_LT(res.residual, 1e-4);
  EXPECT_LT(res.bw_error, 1e-5);
  EXPECT_FALSE(res.param.degenerate());
  // Lyapunov form against the grid average of ||S||^2.
  const FrequencyGrid grid(4096);
  double avg = 0.0;
  for (int n = 0; n < grid.size(); ++n) {
    avg += AnticausalPartTL(res.param.Gamma, ricc, grid.point(n)).squaredNorm();
  }
  EXPECT_NEAR(res.regret, avg / grid.size(), 1e-8 * res.regret);
}

TEST_F(ScalarSynthesis, RegretBetweenNominalAndRobustBounds) {
  // Nominal H2 regret <= DR-RO regret <= H2 controller's worst case.
  const FrequencyGrid grid(1024);
  const Vector R_h2 = ControllerRegretDensity(
      model, ricc, [&](Complex z) { return EvalH2(model, ricc, z); }, grid);
  double previous = R_h2.mean();
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const SynthesisResult res = Synthesize(model, ricc, r, config);
    EXPECT_GT(res.regret, previous);
    EXPECT_LE(res.regret, WorstCaseForDensity(R_h2, r).value * (1 + 1e-6));
    previous = res.regret;
  }
}

TEST_F(ScalarSynthesis, H2RegretDensityIsAnticausalEnergy) {
  const FrequencyGrid grid(256);
  const Vector R = ControllerRegretDensity(
      model, ricc, [&](Complex z) { return EvalH2(model, ricc, z); }, grid);
  for (int n = 0; n < grid.size(); ++n) {
    EXPECT_NEAR(R(n), EvalSplitTU(model, ricc, grid.point(n)).T.squaredNorm(), 1e-12);
  }
}

TEST_F(ScalarSynthesis, SaddlePointValue) {
  // The optimal controller's own worst case equals the synthesized value.
  const SynthesisResult res = Synthesize(model, ricc, 1.0, config);
  const Vector R = ControllerRegretDensity(
      model, ricc,
      [&](Complex z) { return EvalDrroController(model, ricc, res.param.Gamma, res.L.Evaluate(z), z); },
      res.M.grid);
  EXPECT_NEAR(WorstCaseForDensity(R, 1.0).value, res.regret, 1e-4 * res.regret);
}

TEST_F(ScalarSynthesis, SmallRadiusApproachesH2) {
  const SynthesisResult res = Synthesize(model, ricc, 1e-4, config);
  const FrequencyGrid grid(64);
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const CMatrix K = EvalDrroController(model, ricc, res.param.Gamma, res.L.Evaluate(z), z);
    EXPECT_LT((K - EvalH2(model, ricc, z)).norm(), 1e-3 * EvalH2(model, ricc, z).norm());
  }
}

TEST_F(ScalarSynthesis, GapNonnegativeAndTraceWritten) {
  FrankWolfeSolver solver(ricc, FrequencyGrid(512), 1.0);
  SolverState s = solver.Initial();
  for (int k = 0; k < 50; ++k) {
    EXPECT_GE(s.gap, -1e-12);
    EXPECT_NEAR(s.step, 2.0 / (k + 2.0), 1e-15);
    s = solver.Step(s);
  }
  const SynthesisResult res = Synthesize(model, ricc, 1.0, SolverConfig{512, 1e-4, 100, true});
  std::ostringstream out;
  WriteTraceCsv(out, res.trace);
  EXPECT_EQ(out.str().rfind("k,objective,gap,gamma,step\n", 0), 0u);
}

TEST_F(ScalarSynthesis, RejectsNonPositiveRadius) {
  EXPECT_THROW(Synthesize(model, ricc, 0.0, config), Error);
}

TEST_F(ScalarSynthesis, IterationCapReportsNonConvergence) {
  const SynthesisResult res = Synthesize(model, ricc, 1.0, SolverConfig{512, 1e-14, 5, false});
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 5);
}

TEST_F(ScalarSynthesis, ObjectiveClosedFormAndHomogeneity) {
  FrankWolfeSolver solver(ricc, FrequencyGrid(512), 1.0);
  // White iterate: L = 1, Gamma = Bbar, Phi = |Cbar Bbar|^2 / (1 - Abar^2).
  const double a = ricc.Abar(0, 0), cb = ricc.Cbar(0, 0) * ricc.Bbar(0, 0);
  const SolverState s0 = solver.Initial();
  EXPECT_NEAR(s0.objective, cb * cb / (1 - a * a), 1e-12);
  SolverState s = s0;
  for (int k = 0; k < 5; ++k) s = solver.Step(s);
  for (double c : {0.5, 3.0}) {
    const SpectrumSamples scaled(s.M.grid, c * s.M.values);
    EXPECT_NEAR(solver.Objective(scaled), c * solver.Objective(s.M), 1e-10 * c * s.objective);
  }
}

TEST(NstarOnFinerGrid, MatchesFactorOffGrid) {
  const StateSpaceModel model = test::Ac15();
  const RiccatiData ricc = SolveDare(model);
  SolverConfig config;
  config.tol = 1e-9;
  config.max_iterations = 10000;
  const SynthesisResult res = Synthesize(model, ricc, 1.0, config);
  const SpectrumSamples N = SampleNstar(res.param, ricc, FrequencyGrid(2 * config.grid_size));
  for (int n = 0; n < N.grid.size(); ++n) {
    const Complex z = N.grid.point(n);
    EXPECT_LE(std::abs(N.values(n) - std::norm(res.L.Evaluate(z))), 1e-4 * N.values(n));
    EXPECT_NEAR(N.values(n), EvalNstar(res.param, ricc, z), 1e-12 * N.values(n));
  }
}

}  // namespace
}  // namespace drro
