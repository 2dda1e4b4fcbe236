#include "drro/sysmodel.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "drro/linalg.hpp"

namespace drro {
namespace {

constexpr double kResolventRcond = 1e-13;

// Solves (zI - M) X = rhs.
CMatrix SolveResolvent(const Matrix& M, Complex z, const CMatrix& rhs) {
  const Eigen::Index n = M.rows();
  CMatrix lhs = z * CMatrix::Identity(n, n) - M.cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  if (!(lu.rcond() > kResolventRcond)) {
    Throw(ErrorCode::kSingularResolvent,
          "zI - A singular at z = (" + std::to_string(z.real()) + ", " +
              std::to_string(z.imag()) + ")");
  }
  return lu.solve(rhs);
}

Matrix RiccatiMap(const StateSpaceModel& m, const Matrix& Q, const Matrix& P) {
  const Eigen::Index nu = m.Bu.cols();
  Matrix S = Matrix::Identity(nu, nu) + m.Bu.transpose() * P * m.Bu;
  Matrix BtPA = m.Bu.transpose() * P * m.A;
  Matrix next = Q + m.A.transpose() * P * m.A -
                BtPA.transpose() * S.ldlt().solve(BtPA);
  return 0.5 * (next + next.transpose());
}

}  // namespace

StateSpaceModel StateSpaceModel::Create(Matrix A, Matrix Bu, Matrix Bw, Matrix C) {
  const Eigen::Index n = A.rows();
  Require(n > 0 && A.cols() == n, "A must be square and nonempty");
  Require(Bu.rows() == n && Bu.cols() > 0, "Bu must have as many rows as A");
  Require(Bw.rows() == n, "Bw must have as many rows as A");
  Require(Bw.cols() == 1, "only scalar disturbances are supported (Bw must have one column)");
  Require(C.cols() == n && C.rows() > 0, "C must have as many columns as A");
  return StateSpaceModel{std::move(A), std::move(Bu), std::move(Bw), std::move(C)};
}

StateSpaceModel FoldControlWeight(const StateSpaceModel& model, const Matrix& R) {
  Require(R.rows() == model.nu() && R.cols() == model.nu(), "R must be nu x nu");
  Matrix folded = model.Bu * SymmetricPower(0.5 * (R + R.transpose()), -0.5);
  return StateSpaceModel::Create(model.A, folded, model.Bw, model.C);
}

AssumptionReport CheckAssumptions(const StateSpaceModel& model, double tol) {
  AssumptionReport report;
  const Eigen::Index n = model.A.rows();
  Eigen::EigenSolver<Matrix> es(model.A, false);
  const CMatrix A = model.A.cast<Complex>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = es.eigenvalues()(i);
    CMatrix shifted = lambda * CMatrix::Identity(n, n) - A;

    if (std::abs(lambda) >= 1.0 && report.stabilizable) {
      CMatrix pbh(n, n + model.Bu.cols());
      pbh << shifted, model.Bu.cast<Complex>();
      if (NumericalRank(pbh, tol) < n) report.stabilizable = false;
    }
    if (report.disturbance_controllable) {
      CMatrix pbh(n, n + 1);
      pbh << shifted, model.Bw.cast<Complex>();
      if (NumericalRank(pbh, tol) < n) report.disturbance_controllable = false;
    }
    if (report.observable) {
      CMatrix pbh(n + model.C.rows(), n);
      pbh << shifted, model.C.cast<Complex>();
      if (NumericalRank(pbh, tol) < n) report.observable = false;
    }
  }
  if (!report.stabilizable) report.failures.push_back("stabilizability(A,Bu)");
  if (!report.disturbance_controllable) report.failures.push_back("controllability(A,Bw)");
  if (!report.observable) report.failures.push_back("observability(A,C)");
  return report;
}

void RequireAssumptions(const StateSpaceModel& model, double tol) {
  const AssumptionReport report = CheckAssumptions(model, tol);
  if (report.ok()) return;
  std::string names;
  for (const auto& f : report.failures) names += (names.empty() ? "" : ", ") + f;
  Throw(ErrorCode::kModelRejected, "failed rank test(s): " + names);
}

double DareResidual(const StateSpaceModel& model, const Matrix& P) {
  const Matrix Q = model.C.transpose() * model.C;
  return (P - RiccatiMap(model, Q, P)).norm() / std::max(P.norm(), 1e-300);
}

RiccatiData SolveDare(const StateSpaceModel& model, double tol, int max_iterations) {
  Require(tol > 0.0, "tol must be positive");
  const Matrix Q = model.C.transpose() * model.C;
  Matrix P = Q;
  int k = 0;
  bool converged = false;
  for (; k < max_iterations; ++k) {
    Matrix next = RiccatiMap(model, Q, P);
    const double change = (next - P).norm();
    P = std::move(next);
    if (change <= tol * P.norm()) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    Throw(ErrorCode::kNonConvergent,
          "Riccati recursion did not converge in " + std::to_string(max_iterations) + " iterations");
  }

  RiccatiData out;
  const Eigen::Index nu = model.Bu.cols();
  out.P = P;
  Matrix S = Matrix::Identity(nu, nu) + model.Bu.transpose() * P * model.Bu;
  out.K_lqr = S.ldlt().solve(model.Bu.transpose() * P * model.A);
  out.A_k = model.A - model.Bu * out.K_lqr;
  out.Rbar = SymmetricPower(S, -0.5);
  out.Abar = out.A_k.transpose();
  out.Bbar = out.A_k.transpose() * P * model.Bw;
  out.Cbar = -out.Rbar * model.Bu.transpose();
  out.iterations = k + 1;
  out.residual = DareResidual(model, P);

  if (SpectralRadius(out.A_k) >= 1.0) {
    Throw(ErrorCode::kNotStabilizing, "closed-loop spectral radius >= 1 at the Riccati fixed point");
  }
  return out;
}

CMatrix EvalF(const StateSpaceModel& model, Complex z) {
  return model.C.cast<Complex>() * SolveResolvent(model.A, z, model.Bu.cast<Complex>());
}

CMatrix EvalG(const StateSpaceModel& model, Complex z) {
  return model.C.cast<Complex>() * SolveResolvent(model.A, z, model.Bw.cast<Complex>());
}

CMatrix EvalNoncausalK0(const StateSpaceModel& model, Complex z) {
  const CMatrix F = EvalF(model, z);
  const CMatrix G = EvalG(model, z);
  const Eigen::Index nu = model.nu();
  CMatrix gram = CMatrix::Identity(nu, nu) + F.adjoint() * F;
  return -gram.ldlt().solve(F.adjoint() * G);
}

TransferSplit EvalSplitTU(const StateSpaceModel& model, const RiccatiData& ricc, Complex z) {
  TransferSplit out;
  // (z^{-1} I - Abar)^{-1} Bbar
  out.T = ricc.Cbar.cast<Complex>() *
          SolveResolvent(ricc.Abar, 1.0 / z, ricc.Bbar.cast<Complex>());
  const CMatrix Bw = model.Bw.cast<Complex>();
  CMatrix inner = model.A.cast<Complex>() * SolveResolvent(model.A, z, Bw) + Bw;
  out.U = ricc.Cbar.cast<Complex>() * ricc.P.cast<Complex>() * inner;
  return out;
}

DeltaPair EvalDelta(const StateSpaceModel& model, const RiccatiData& ricc, Complex z) {
  const Eigen::Index nu = model.nu();
  const CMatrix I = CMatrix::Identity(nu, nu);
  const CMatrix K = ricc.K_lqr.cast<Complex>();
  const CMatrix Bu = model.Bu.cast<Complex>();
  const CMatrix Rbar = ricc.Rbar.cast<Complex>();
  DeltaPair out;
  out.delta = Rbar.inverse() * (I + K * SolveResolvent(model.A, z, Bu));
  out.delta_inv = (I - K * SolveResolvent(ricc.A_k, z, Bu)) * Rbar;
  return out;
}

CMatrix EvalH2(const StateSpaceModel& model, const RiccatiData& ricc, Complex z) {
  return EvalDelta(model, ricc, z).delta_inv * EvalSplitTU(model, ricc, z).U;
}

}  // namespace drro
