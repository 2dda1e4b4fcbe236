#pragma once

#include "drro/common.hpp"

namespace drro {

double SpectralRadius(const Eigen::Ref<const Matrix>& A);

/// Returns S^p for a symmetric positive-definite S via its eigendecomposition.
Matrix SymmetricPower(const Eigen::Ref<const Matrix>& S, double p);

struct SteinSolution {
  Matrix X;
  double residual = 0.0;  // ||X - A X B - C|| / max(1, ||X||)
  double condition = 1.0;
};

/// Solves the Stein equation X = A X B + C by Kronecker unfolding.
/// Throws kIllConditioned when the unfolded system's condition estimate
/// exceeds `max_condition`.
SteinSolution SolveStein(const Eigen::Ref<const Matrix>& A,
                         const Eigen::Ref<const Matrix>& B,
                         const Eigen::Ref<const Matrix>& C,
                         double max_condition = 1e12);

/// X = Q + A' X A, requires rho(A) < 1 (kLyapunovFailure otherwise).
Matrix SolveDiscreteLyapunov(const Eigen::Ref<const Matrix>& A,
                             const Eigen::Ref<const Matrix>& Q);

/// Numerical rank from singular values, relative to max(1, sigma_max).
int NumericalRank(const Eigen::Ref<const CMatrix>& M, double tol);

}  // namespace drro
