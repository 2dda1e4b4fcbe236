#include "drro/finite_horizon.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "drro/linalg.hpp"
#include "drro/solver.hpp"

namespace drro {
namespace {

Matrix Reverse(const Matrix& X) { return X.colwise().reverse().rowwise().reverse(); }

struct SymmetricSpectrum {
  Vector values;
  Matrix vectors;
};

// R = E'E with nonnegative eigenvalues (roundoff clamped).
SymmetricSpectrum RegretSpectrum(const FiniteHorizonOperators& ops, const Matrix& K) {
  const Matrix E = ops.Delta * K - ops.DeltaK0;
  const Matrix R = E.transpose() * E;
  Eigen::SelfAdjointEigenSolver<Matrix> es(R);
  return {es.eigenvalues().cwiseMax(0.0), es.eigenvectors()};
}

}  // namespace

FiniteHorizonOperators BuildFiniteOperators(const StateSpaceModel& model, int T,
                                            int max_dimension) {
  Require(T >= 2, "horizon must be at least 2");
  const int nx = model.nx(), nu = model.nu(), ns = model.ns();
  if (static_cast<long>(T) * std::max({nx, nu, ns}) > max_dimension) {
    Throw(ErrorCode::kMemoryGuard, "horizon " + std::to_string(T) + " exceeds the dense size cap");
  }
  // Markov parameters of an unstable plant grow like rho^T; past ~1e15 the
  // Gram I + F'F is numerically meaningless.
  const double rho = SpectralRadius(model.A);
  if (rho > 1.0 && static_cast<double>(T) * std::log10(rho) > 15.0) {
    Throw(ErrorCode::kIllConditioned, "horizon " + std::to_string(T) +
                                          " too long for an open-loop spectral radius of " +
                                          std::to_string(rho));
  }
  FiniteHorizonOperators ops;
  ops.T = T;
  ops.nu = nu;
  ops.ns = ns;
  ops.F = Matrix::Zero(T * ns, T * nu);
  ops.G = Matrix::Zero(T * ns, T);

  // Markov parameters C A^k Bu, C A^k Bw for k = 0..T-2.
  std::vector<Matrix> mu, mw;
  Matrix CA = model.C;
  for (int k = 0; k + 1 < T; ++k) {
    mu.push_back(CA * model.Bu);
    mw.push_back(CA * model.Bw);
    CA = CA * model.A;
  }
  for (int i = 1; i < T; ++i) {
    for (int j = 0; j < i; ++j) {
      ops.F.block(i * ns, j * nu, ns, nu) = mu[static_cast<size_t>(i - j - 1)];
      ops.G.block(i * ns, j, ns, 1) = mw[static_cast<size_t>(i - j - 1)];
    }
  }

  // Householder QR of the column-reversed stack [F; I] J = Q R gives
  // I + F'F = (J R J)'(J R J) without forming F'F, whose conditioning is
  // squared and unusable for unstable A over long horizons.
  const int n = T * nu;
  Matrix stack(T * ns + n, n);
  stack.topRows(T * ns) = ops.F.rowwise().reverse();
  stack.bottomRows(n) = Matrix::Identity(n, n).rowwise().reverse();
  Eigen::HouseholderQR<Matrix> qr(stack);
  Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Matrix rhs = Matrix::Zero(stack.rows(), T);
  rhs.topRows(T * ns) = ops.G;
  rhs = qr.householderQ().adjoint() * rhs;
  Matrix QtG = rhs.topRows(n);
  for (int i = 0; i < n; ++i) {
    if (R(i, i) < 0.0) {
      R.row(i) *= -1.0;
      QtG.row(i) *= -1.0;
    }
  }
  ops.Delta = Reverse(R);
  // Delta K0 = -J Q'[G; 0], so K0 follows from one triangular solve.
  ops.DeltaK0 = -QtG.colwise().reverse();
  ops.K0 = ops.Delta.triangularView<Eigen::Lower>().solve(ops.DeltaK0);
  return ops;
}

Matrix ObservabilityStack(const StateSpaceModel& model, int T) {
  Matrix O(T * model.ns(), model.nx());
  Matrix CA = model.C;
  for (int t = 0; t < T; ++t) {
    O.middleRows(t * model.ns(), model.ns()) = CA;
    CA = CA * model.A;
  }
  return O;
}

FiniteRegret FiniteDualRegret(const FiniteHorizonOperators& ops, const Matrix& K, double r) {
  Require(K.rows() == ops.T * ops.nu && K.cols() == ops.T, "controller must be (T nu) x T");
  Require(r > 0.0, "radius must be positive");
  FiniteRegret out;
  if ((K - ops.K0).isZero(0.0)) {
    out.gamma = kInfiniteGamma;
    out.worst_covariance = Matrix::Identity(ops.T, ops.T);
    return out;
  }
  const SymmetricSpectrum spec = RegretSpectrum(ops, K);
  // sum(...) = T r^2 is the grid-mean condition of BisectGamma.
  out.gamma = BisectGamma(spec.values, r);
  if (!std::isfinite(out.gamma)) {
    out.worst_covariance = Matrix::Identity(ops.T, ops.T);
    return out;
  }
  const Vector inv = (1.0 - spec.values.array() / out.gamma).inverse();
  out.regret = out.gamma * (inv.array() - 1.0).sum() + out.gamma * ops.T * r * r;
  out.worst_covariance = spec.vectors * inv.array().square().matrix().asDiagonal() *
                         spec.vectors.transpose();
  return out;
}

Matrix CausalPart(const Matrix& X, int block_rows) {
  Matrix out = X;
  const Eigen::Index T = X.cols();
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t + 1 < T) out.block(t * block_rows, t + 1, block_rows, T - t - 1).setZero();
  }
  return out;
}

Matrix WienerHopfController(const FiniteHorizonOperators& ops, const Matrix& L) {
  const Matrix causal = CausalPart(ops.DeltaK0 * L, ops.nu);
  const Matrix left = ops.Delta.triangularView<Eigen::Lower>().solve(causal);
  // left * L^{-1}  =  (L'^{-1} left')'
  return L.transpose().triangularView<Eigen::Upper>().solve(left.transpose()).transpose();
}

Matrix FiniteH2Controller(const FiniteHorizonOperators& ops) {
  return WienerHopfController(ops, Matrix::Identity(ops.T, ops.T));
}

Matrix ToeplitzFromController(const RealizedController& ctrl, int T) {
  const int nu = static_cast<int>(ctrl.H.rows());
  std::vector<Matrix> taps;
  taps.push_back(ctrl.J);
  Matrix FkG = ctrl.G;
  for (int k = 1; k < T; ++k) {
    taps.push_back(ctrl.H * FkG);
    FkG = ctrl.F * FkG;
  }
  Matrix K = Matrix::Zero(T * nu, T);
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j <= i; ++j) K.block(i * nu, j, nu, 1) = taps[static_cast<size_t>(i - j)];
  }
  return K;
}

FiniteOracleResult FiniteFwOracle(const FiniteHorizonOperators& ops, double r,
                                  const FiniteOracleOptions& options) {
  Require(r > 0.0, "radius must be positive");
  const int T = ops.T;
  FiniteOracleResult out;
  out.M = Matrix::Identity(T, T);
  for (int k = 0; k < options.max_iterations; ++k) {
    Eigen::LLT<Matrix> llt(out.M);
    if (llt.info() != Eigen::Success) Throw(ErrorCode::kNonPositiveSpectrum, "iterate lost definiteness");
    out.K = WienerHopfController(ops, llt.matrixL());
    const SymmetricSpectrum spec = RegretSpectrum(ops, out.K);
    out.gamma = BisectGamma(spec.values, r);
    out.regret = (spec.vectors.transpose() * out.M * spec.vectors).diagonal().dot(spec.values);
    out.iterations = k + 1;
    if (!std::isfinite(out.gamma)) {
      out.converged = true;
      break;
    }
    const Vector wc = (1.0 - spec.values.array() / out.gamma).square().inverse();
    const Matrix target = spec.vectors * wc.asDiagonal() * spec.vectors.transpose();
    const double eta = 2.0 / (k + 2.0);
    Matrix next = (1.0 - eta) * out.M + eta * target;
    next = 0.5 * (next + next.transpose());
    const double change = (next - out.M).norm() / out.M.norm();
    out.M = std::move(next);
    if (change <= options.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace drro
