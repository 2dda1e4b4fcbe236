#include "drro/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>

namespace drro {
namespace {

constexpr double kReducedCostTol = 1e-11;
constexpr double kPivotTol = 1e-10;
constexpr int kRefactorInterval = 32;
constexpr int kDegenerateStreak = 40;

// Revised simplex for min c'y, E y = f, y >= 0 where column j < M of E is
// [a_j; 1] and columns M.. are artificials. Rows of E: n + 1.
class DualSimplex {
 public:
  DualSimplex(const Matrix& A, const Vector& b, int max_pivots)
      : A_(A), b_(b), M_(static_cast<int>(A.rows())), rows_(static_cast<int>(A.cols()) + 1),
        max_pivots_(max_pivots) {
    f_ = Vector::Zero(rows_);
    f_(rows_ - 1) = 1.0;
    basis_.resize(static_cast<size_t>(rows_));
    for (int r = 0; r < rows_; ++r) basis_[static_cast<size_t>(r)] = M_ + r;
    Refactor();
  }

  Vector Column(int j) const {
    Vector col = Vector::Zero(rows_);
    if (j < M_) {
      col.head(rows_ - 1) = A_.row(j).transpose();
      col(rows_ - 1) = 1.0;
    } else {
      col(j - M_) = 1.0;
    }
    return col;
  }

  double Cost(int j, bool phase_one) const {
    if (phase_one) return j >= M_ ? 1.0 : 0.0;
    return j < M_ ? b_(j) : 0.0;
  }

  void Refactor() {
    Matrix B(rows_, rows_);
    for (int r = 0; r < rows_; ++r) B.col(r) = Column(basis_[static_cast<size_t>(r)]);
    Eigen::PartialPivLU<Matrix> lu(B);
    binv_ = lu.inverse();
    xb_ = binv_ * f_;
    since_refactor_ = 0;
  }

  Vector Multipliers(bool phase_one) const {
    Vector cb(rows_);
    for (int r = 0; r < rows_; ++r) cb(r) = Cost(basis_[static_cast<size_t>(r)], phase_one);
    return binv_.transpose() * cb;
  }

  // Runs one phase to optimality.
  void Optimize(bool phase_one) {
    bool bland = false;
    int degenerate = 0;
    while (true) {
      const Vector pi = Multipliers(phase_one);
      // Reduced costs of the real columns: c_j - pi'[a_j; 1].
      const Vector d = (phase_one ? Vector::Zero(M_) : b_) -
                       (A_ * pi.head(rows_ - 1)).array().matrix() -
                       Vector::Constant(M_, pi(rows_ - 1));
      int entering = -1;
      if (bland) {
        for (int j = 0; j < M_; ++j) {
          if (d(j) < -kReducedCostTol && !InBasis(j)) {
            entering = j;
            break;
          }
        }
      } else {
        double best = -kReducedCostTol;
        for (int j = 0; j < M_; ++j) {
          if (d(j) < best && !InBasis(j)) {
            best = d(j);
            entering = j;
          }
        }
      }
      if (entering < 0) return;

      const Vector w = binv_ * Column(entering);
      const double wmax = w.cwiseAbs().maxCoeff();
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        if (w(r) <= kPivotTol * std::max(1.0, wmax)) continue;
        const double q = std::max(xb_(r), 0.0) / w(r);
        if (q < ratio - 1e-15 ||
            (q <= ratio + 1e-15 && leave >= 0 &&
             basis_[static_cast<size_t>(r)] < basis_[static_cast<size_t>(leave)])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave < 0) Throw(ErrorCode::kSolverStall, "LP dual unbounded (primal infeasible)");

      Pivot(entering, leave, w);
      if (++pivots_ > max_pivots_) {
        Throw(ErrorCode::kSolverStall, "simplex exceeded " + std::to_string(max_pivots_) + " pivots");
      }
      if (ratio <= 1e-14) {
        if (++degenerate >= kDegenerateStreak) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

  void Pivot(int entering, int leave, const Vector& w) {
    basis_[static_cast<size_t>(leave)] = entering;
    if (++since_refactor_ >= kRefactorInterval) {
      Refactor();
      return;
    }
    const double piv = w(leave);
    binv_.row(leave) /= piv;
    xb_(leave) /= piv;
    for (int r = 0; r < rows_; ++r) {
      if (r == leave || w(r) == 0.0) continue;
      binv_.row(r) -= w(r) * binv_.row(leave);
      xb_(r) -= w(r) * xb_(leave);
    }
  }

  bool InBasis(int j) const {
    for (int v : basis_) {
      if (v == j) return true;
    }
    return false;
  }

  // After phase one: pivot zero-level artificials out where possible.
  void DriveOutArtificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[static_cast<size_t>(r)] < M_) continue;
      const Vector row = binv_.row(r);
      // (B^{-1} E)_{r,j} for every real column j.
      const Vector coeffs = A_ * row.head(rows_ - 1) + Vector::Constant(M_, row(rows_ - 1));
      Eigen::Index j = 0;
      const double mag = coeffs.cwiseAbs().maxCoeff(&j);
      if (mag > 1e-9 && !InBasis(static_cast<int>(j))) {
        Pivot(static_cast<int>(j), r, binv_ * Column(static_cast<int>(j)));
      }
    }
  }

  double PhaseOneValue() const {
    double s = 0.0;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[static_cast<size_t>(r)] >= M_) s += xb_(r);
    }
    return s;
  }

  int pivots() const { return pivots_; }

 private:
  const Matrix& A_;
  const Vector& b_;
  int M_;
  int rows_;
  int max_pivots_;
  Vector f_;
  std::vector<int> basis_;
  Matrix binv_;
  Vector xb_;
  int since_refactor_ = 0;
  int pivots_ = 0;
};

}  // namespace

MinMaxSolution SolveMinMax(const Matrix& A, const Vector& b, int max_pivots) {
  Require(A.rows() == b.size(), "SolveMinMax: row count mismatch");
  Require(A.rows() > A.cols(), "SolveMinMax: needs more rows than unknowns");
  const Vector norms = A.rowwise().norm();
  Require(norms.minCoeff() > 0.0, "SolveMinMax: zero constraint row");
  const Matrix An = norms.cwiseInverse().asDiagonal() * A;
  const Vector bn = b.cwiseQuotient(norms);

  DualSimplex simplex(An, bn, max_pivots);
  simplex.Optimize(true);
  if (simplex.PhaseOneValue() > 1e-9) {
    Throw(ErrorCode::kSolverStall, "LP dual infeasible; the min-max problem is unbounded");
  }
  simplex.DriveOutArtificials();
  simplex.Optimize(false);

  const Vector pi = simplex.Multipliers(false);
  MinMaxSolution out;
  out.x = pi.head(A.cols());
  out.value = (An * out.x - bn).maxCoeff();
  out.pivots = simplex.pivots();
  return out;
}

std::optional<Vector> FindFeasiblePoint(const Matrix& A, const Vector& b, double tol,
                                        int max_pivots) {
  MinMaxSolution sol = SolveMinMax(A, b, max_pivots);
  if (sol.value > tol) return std::nullopt;
  return sol.x;
}

}  // namespace drro
