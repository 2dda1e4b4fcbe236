#include "drro/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace drro {

double SpectralRadius(const Eigen::Ref<const Matrix>& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix SymmetricPower(const Eigen::Ref<const Matrix>& S, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    Throw(ErrorCode::kInvalidArgument, "matrix power needs a symmetric positive-definite matrix");
  }
  Vector d = es.eigenvalues().array().pow(p);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

SteinSolution SolveStein(const Eigen::Ref<const Matrix>& A,
                         const Eigen::Ref<const Matrix>& B,
                         const Eigen::Ref<const Matrix>& C,
                         double max_condition) {
  const Eigen::Index n = A.rows(), m = B.rows();
  Require(A.cols() == n && B.cols() == m && C.rows() == n && C.cols() == m,
          "SolveStein: dimension mismatch");
  SteinSolution out;
  if (n == 0 || m == 0) {
    out.X = Matrix::Zero(n, m);
    return out;
  }
  // vec(A X B) = (B' kron A) vec(X)
  Matrix system = Matrix::Identity(n * m, n * m) -
                  Eigen::kroneckerProduct(B.transpose(), A).eval();
  Eigen::JacobiSVD<Matrix> svd(system);
  const auto& sv = svd.singularValues();
  out.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                        : std::numeric_limits<double>::infinity();
  if (!(out.condition <= max_condition)) {
    Throw(ErrorCode::kIllConditioned,
          "Stein equation condition estimate " + std::to_string(out.condition));
  }
  Vector rhs = Eigen::Map<const Vector>(C.eval().data(), n * m);
  Vector x = system.partialPivLu().solve(rhs);
  out.X = Eigen::Map<Matrix>(x.data(), n, m);
  out.residual = (out.X - A * out.X * B - C).norm() / std::max(1.0, out.X.norm());
  return out;
}

Matrix SolveDiscreteLyapunov(const Eigen::Ref<const Matrix>& A,
                             const Eigen::Ref<const Matrix>& Q) {
  if (SpectralRadius(A) >= 1.0) {
    Throw(ErrorCode::kLyapunovFailure, "spectral radius >= 1");
  }
  Matrix At = A.transpose();
  Matrix X = SolveStein(At, A, Q).X;
  return 0.5 * (X + X.transpose());
}

int NumericalRank(const Eigen::Ref<const CMatrix>& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& sv = svd.singularValues();
  const double threshold = tol * std::max(1.0, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

}  // namespace drro
