#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "drro/linalg.hpp"
#include "drro/model_io.hpp"
#include "drro/spectral.hpp"
#include "drro/sysmodel.hpp"
#include "test_models.hpp"

namespace drro {
namespace {

using test::Ac15;
using test::ScalarModel;

TEST(SolveDare, ScalarClosedForm) {
  // P = 1 + a^2 P / (1 + P) with a = 0.5, i.e. P^2 - P/4 - 1 = 0.
  const RiccatiData ricc = SolveDare(ScalarModel());
  const double expected = (0.25 + std::sqrt(0.0625 + 4.0)) / 2.0;
  EXPECT_NEAR(ricc.P(0, 0), expected, 1e-12);
  EXPECT_NEAR(ricc.K_lqr(0, 0), expected * 0.5 / (1.0 + expected), 1e-12);
  EXPECT_NEAR(ricc.Rbar(0, 0), 1.0 / std::sqrt(1.0 + expected), 1e-12);
  EXPECT_LT(ricc.residual, 1e-12);
}

TEST(SolveDare, Ac15IsStabilizing) {
  const StateSpaceModel m = Ac15();
  EXPECT_GT(SpectralRadius(m.A), 1.0);
  const RiccatiData ricc = SolveDare(m);
  EXPECT_LT(SpectralRadius(ricc.A_k), 1.0);
  EXPECT_LT(ricc.residual, 1e-10);
  EXPECT_TRUE((ricc.P - ricc.P.transpose()).norm() < 1e-9 * ricc.P.norm());
}

TEST(Assumptions, RejectsUncontrollableDisturbance) {
  const StateSpaceModel m = StateSpaceModel::Create(
      Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  const AssumptionReport report = CheckAssumptions(m);
  EXPECT_FALSE(report.ok());
  EXPECT_FALSE(report.disturbance_controllable);
  EXPECT_TRUE(report.stabilizable);
  try {
    RequireAssumptions(m);
    FAIL() << "expected a rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelRejected);
    EXPECT_NE(std::string(e.what()).find("controllability(A,Bw)"), std::string::npos);
  }
}

TEST(Assumptions, RejectsUnstabilizable) {
  Matrix A(2, 2);
  A << 1.5, 0.0, 0.0, 0.5;
  Matrix Bu(2, 1);
  Bu << 0.0, 1.0;
  const StateSpaceModel m =
      StateSpaceModel::Create(A, Bu, Matrix::Ones(2, 1), Matrix::Identity(2, 2));
  EXPECT_FALSE(CheckAssumptions(m).stabilizable);
}

TEST(Create, RejectsBadShapes) {
  EXPECT_THROW(StateSpaceModel::Create(Matrix::Ones(2, 3), Matrix::Ones(2, 1), Matrix::Ones(2, 1),
                                       Matrix::Ones(1, 2)),
               Error);
  EXPECT_THROW(StateSpaceModel::Create(Matrix::Ones(2, 2), Matrix::Ones(2, 1), Matrix::Ones(2, 2),
                                       Matrix::Ones(1, 2)),
               Error);
}

TEST(NoncausalK0, ZeroWithoutDisturbanceInput) {
  const StateSpaceModel m = StateSpaceModel::Create(
      Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  const FrequencyGrid grid(16);
  for (int n = 0; n < grid.size(); ++n) {
    EXPECT_EQ(EvalNoncausalK0(m, grid.point(n)).norm(), 0.0);
  }
}

TEST(NoncausalK0, ScalarFormula) {
  // F = G = 1/(z - 0.5), K0 = -conj(F) G / (1 + |F|^2) = -1 / (|z - 0.5|^2 + 1).
  const StateSpaceModel m = ScalarModel();
  const FrequencyGrid grid(32);
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const Complex expected = -1.0 / (std::norm(z - 0.5) + 1.0);
    EXPECT_NEAR(std::abs(EvalNoncausalK0(m, z)(0, 0) - expected), 0.0, 1e-14);
  }
}

TEST(EvalDelta, FactorsTheGram) {
  const StateSpaceModel m = Ac15();
  const RiccatiData ricc = SolveDare(m);
  const FrequencyGrid grid(64);
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const CMatrix F = EvalF(m, z);
    const DeltaPair d = EvalDelta(m, ricc, z);
    const CMatrix gram = CMatrix::Identity(m.nu(), m.nu()) + F.adjoint() * F;
    EXPECT_LT((d.delta.adjoint() * d.delta - gram).norm(), 1e-9 * gram.norm());
    EXPECT_LT((d.delta * d.delta_inv - CMatrix::Identity(m.nu(), m.nu())).norm(), 1e-10);
  }
}

TEST(EvalSplitTU, SumsToDeltaK0) {
  const StateSpaceModel m = Ac15();
  const RiccatiData ricc = SolveDare(m);
  const FrequencyGrid grid(64);
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const TransferSplit tu = EvalSplitTU(m, ricc, z);
    const CMatrix dk0 = EvalDelta(m, ricc, z).delta * EvalNoncausalK0(m, z);
    EXPECT_LT((tu.T + tu.U - dk0).norm(), 1e-9 * std::max(1.0, dk0.norm()));
  }
}

TEST(EvalSplitTU, AnticausalPartHasNoConstantTerm) {
  // The grid mean of a strictly anticausal transfer is zero.
  const StateSpaceModel m = Ac15();
  const RiccatiData ricc = SolveDare(m);
  const FrequencyGrid grid(1024);
  CMatrix mean = CMatrix::Zero(m.nu(), 1);
  for (int n = 0; n < grid.size(); ++n) mean += EvalSplitTU(m, ricc, grid.point(n)).T;
  EXPECT_LT(mean.norm() / grid.size(), 1e-10);
}

TEST(ModelIo, RoundTrip) {
  const StateSpaceModel m = Ac15();
  const auto path = std::filesystem::temp_directory_path() / "drro_model_roundtrip.txt";
  SaveModel(path, m);
  const StateSpaceModel back = LoadModel(path);
  EXPECT_EQ((back.A - m.A).norm(), 0.0);
  EXPECT_EQ((back.Bu - m.Bu).norm(), 0.0);
  EXPECT_EQ((back.Bw - m.Bw).norm(), 0.0);
  EXPECT_EQ((back.C - m.C).norm(), 0.0);
  std::filesystem::remove(path);
}

TEST(ModelIo, MissingMatrixIsAnError) {
  std::istringstream in("A 1 1\n0.5\nBu 1 1\n1\nC 1 1\n1\n");
  EXPECT_THROW(ParseModel(in), Error);
}

TEST(Linalg, SteinMatchesDirectSum) {
  Matrix A(2, 2), B(2, 2), C(2, 2);
  A << 0.5, 0.1, -0.2, 0.3;
  B << 0.4, 0.0, 0.1, -0.6;
  C << 1.0, 2.0, 3.0, 4.0;
  // X = sum_k A^k C B^k.
  Matrix expected = Matrix::Zero(2, 2), Ak = Matrix::Identity(2, 2), Bk = Matrix::Identity(2, 2);
  for (int k = 0; k < 200; ++k) {
    expected += Ak * C * Bk;
    Ak = Ak * A;
    Bk = Bk * B;
  }
  const SteinSolution s = SolveStein(A, B, C);
  EXPECT_LT((s.X - expected).norm(), 1e-12);
  EXPECT_THROW(SolveDiscreteLyapunov(Matrix::Constant(1, 1, 1.2), Matrix::Ones(1, 1)), Error);
}

}  // namespace
}  // namespace drro
