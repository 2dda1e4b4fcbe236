#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "drro/finite_horizon.hpp"
#include "drro/realize.hpp"
#include "drro/solver.hpp"
#include "test_models.hpp"

namespace drro {
namespace {

// Independent primal evaluation: sum_i lambda_i (1 - lambda_i/g)^{-2} with
// sum_i (lambda_i / (g - lambda_i))^2 = T r^2, bisected on log g.
double PrimalWorstCase(const Matrix& R, double r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(R);
  const Vector lam = es.eigenvalues().cwiseMax(0.0);
  const double target = static_cast<double>(R.rows()) * r * r;
  auto excess = [&](double g) {
    return (lam.array() / (g - lam.array())).square().sum() - target;
  };
  double lo = lam.maxCoeff() * (1 + 1e-15), hi = 2 * lam.maxCoeff() + 1;
  while (excess(hi) > 0) hi *= 2;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return (lam.array() / (1 - lam.array() / hi).square()).sum();
}

TEST(BuildFiniteOperators, FactorsTheGram) {
  const StateSpaceModel model = test::Ac15();
  const FiniteHorizonOperators ops = BuildFiniteOperators(model, 12);
  const Matrix gram = Matrix::Identity(12 * model.nu(), 12 * model.nu()) + ops.F.transpose() * ops.F;
  EXPECT_LT((ops.Delta.transpose() * ops.Delta - gram).norm(), 1e-9 * gram.norm());
  EXPECT_TRUE(ops.Delta.isApprox(Matrix(ops.Delta.triangularView<Eigen::Lower>())));
  EXPECT_LT((ops.Delta * ops.K0 - ops.DeltaK0).norm(), 1e-9 * std::max(1.0, ops.DeltaK0.norm()));
  EXPECT_LT((gram * ops.K0 + ops.F.transpose() * ops.G).norm(), 1e-8 * gram.norm());
}

TEST(BuildFiniteOperators, Guards) {
  const StateSpaceModel model = test::Ac15();
  EXPECT_THROW(BuildFiniteOperators(model, 1), Error);
  try {
    BuildFiniteOperators(model, 64, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMemoryGuard);
  }
  try {
    BuildFiniteOperators(model, 1000, 1 << 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIllConditioned);
  }
}

TEST(FiniteDualRegret, NoncausalControllerIsExactlyZero) {
  const StateSpaceModel model = test::Ac15();
  for (int T : {8, 64}) {
    const FiniteHorizonOperators ops = BuildFiniteOperators(model, T);
    for (double r : {0.01, 1.0, 100.0}) EXPECT_EQ(FiniteDualRegret(ops, ops.K0, r).regret, 0.0);
  }
}

TEST(FiniteDualRegret, MatchesPrimalOracle) {
  const StateSpaceModel model = test::Ac15();
  const RiccatiData ricc = SolveDare(model);
  const FiniteHorizonOperators ops = BuildFiniteOperators(model, 20);
  const Matrix K = ToeplitzFromController(RealizeH2(model, ricc), 20);
  const Matrix E = ops.F * K + ops.G;
  const Matrix E0 = ops.F * ops.K0 + ops.G;
  // Regret operator from costs: (FK+G)'(FK+G) + K'K - the same for K0.
  const Matrix R = E.transpose() * E + K.transpose() * K - E0.transpose() * E0 -
                   ops.K0.transpose() * ops.K0;
  for (double r : {0.3, 1.5}) {
    const FiniteRegret fr = FiniteDualRegret(ops, K, r);
    const double primal = PrimalWorstCase(0.5 * (R + R.transpose()), r);
    EXPECT_NEAR(fr.regret, primal, 1e-6 * primal);
    // The covariance returned is feasible: tr(M + I - 2 M^{1/2}) = T r^2.
    Eigen::SelfAdjointEigenSolver<Matrix> es(fr.worst_covariance);
    const double w2 = (es.eigenvalues().array().sqrt() - 1.0).square().sum();
    EXPECT_NEAR(w2, 20 * r * r, 1e-6 * 20 * r * r);
  }
}

TEST(WienerHopfController, IdentityWeightIsFiniteH2) {
  const StateSpaceModel model = test::ScalarModel();
  const FiniteHorizonOperators ops = BuildFiniteOperators(model, 16);
  const Matrix K = FiniteH2Controller(ops);
  EXPECT_EQ(K, CausalPart(K, 1));
  // The finite H2 controller minimizes ||F K + G||^2 + ||K||^2 over causal K:
  // perturbing any causal entry does not decrease the cost.
  auto cost = [&](const Matrix& X) { return (ops.F * X + ops.G).squaredNorm() + X.squaredNorm(); };
  const double base = cost(K);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j <= i; ++j) {
      Matrix P = K;
      P(i, j) += 1e-4;
      EXPECT_GE(cost(P), base - 1e-12);
    }
  }
}

TEST(ToeplitzFromController, MarkovParameters) {
  const StateSpaceModel model = test::ScalarModel();
  const RiccatiData ricc = SolveDare(model);
  const RealizedController h2 = RealizeH2(model, ricc);
  const Matrix K = ToeplitzFromController(h2, 6);
  EXPECT_EQ(K(0, 0), h2.J(0, 0));
  EXPECT_NEAR(K(3, 1), (h2.H * h2.F * h2.G)(0, 0), 1e-15);
  EXPECT_EQ(K(1, 2), 0.0);
}

TEST(FiniteFwOracle, SaddlePointOnScalarPlant) {
  const StateSpaceModel model = test::ScalarModel();
  const FiniteHorizonOperators ops = BuildFiniteOperators(model, 24);
  const FiniteOracleResult o = FiniteFwOracle(ops, 1.0);
  EXPECT_TRUE(o.converged);
  // The oracle's controller has worst case close to its value, and it beats
  // the finite H2 controller in the worst case.
  const double own = FiniteDualRegret(ops, o.K, 1.0).regret;
  EXPECT_NEAR(own, o.regret, 1e-3 * o.regret);
  EXPECT_LT(own, FiniteDualRegret(ops, FiniteH2Controller(ops), 1.0).regret);
}

}  // namespace
}  // namespace drro
