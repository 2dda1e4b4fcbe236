#pragma once

#include <optional>

#include "drro/common.hpp"

namespace drro {

struct MinMaxSolution {
  Vector x;
  double value = 0.0;  // min over x of max_i (a_i'x - b_i), rows unit-normalized
  int pivots = 0;
};

/// Solves min_x max_i (a_i'x - b_i) for a tall dense system, with each row
/// (a_i, b_i) first scaled to unit ||a_i||. Works on the dual
///
///   min b'y  s.t.  A'y = 0,  1'y = 1,  y >= 0
///
/// with a two-phase revised simplex whose basis has only cols(A)+1 rows; x
/// is read off the simplex multipliers. Throws kSolverStall past
/// `max_pivots`. The problem must be bounded (e.g. include box rows).
MinMaxSolution SolveMinMax(const Matrix& A, const Vector& b, int max_pivots = 200000);

/// Returns x with A x <= b (each row to within tol * ||a_i||), or nullopt
/// when the system is infeasible.
std::optional<Vector> FindFeasiblePoint(const Matrix& A, const Vector& b, double tol = 1e-9,
                                        int max_pivots = 200000);

}  // namespace drro
