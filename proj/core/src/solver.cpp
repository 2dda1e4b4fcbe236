#include "drro/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/LU>

#include "drro/linalg.hpp"

namespace drro {
namespace {

constexpr double kMinFactorModulus = 1e-10;

// mean((R / (gamma - R))^2), i.e. mean(((1 - R/gamma)^{-1} - 1)^2).
double ConstraintValue(const Vector& R, double gamma) {
  return (R.array() / (gamma - R.array())).square().mean();
}

double BwSquared(const Vector& M) { return (M.array().sqrt() - 1.0).square().mean(); }

}  // namespace

double GradientRk(const CVector& Gamma, Complex L, const RiccatiData& ricc, Complex z) {
  if (std::abs(L) < kMinFactorModulus) {
    Throw(ErrorCode::kDivisionNearZero, "|L(z)| below 1e-10");
  }
  const Eigen::Index nx = ricc.Abar.rows();
  CMatrix lhs = CMatrix::Identity(nx, nx) - z * ricc.Abar.cast<Complex>();
  const CVector S = ricc.Cbar.cast<Complex>() * lhs.partialPivLu().solve(Gamma);
  return S.squaredNorm() / std::norm(L);
}

Vector GradientOnGrid(const CVector& Gamma, const FactorSamples& factor,
                      const ResolventTable& table) {
  Require(factor.grid == table.grid(), "factor and resolvent table grids differ");
  const int N = factor.grid.size();
  Vector R(N);
  for (int n = 0; n < N; ++n) {
    const Complex L = factor.values(n);
    if (std::abs(L) < kMinFactorModulus) {
      Throw(ErrorCode::kDivisionNearZero, "|L(z)| below 1e-10 at grid index " + std::to_string(n));
    }
    R(n) = (table.cr(n) * Gamma).squaredNorm() / std::norm(L);
  }
  return R;
}

double BisectGamma(const Vector& R, double r) {
  Require(r > 0.0, "radius must be positive");
  Require(R.size() > 0, "empty gradient");
  Require(R.minCoeff() >= 0.0, "gradient density must be nonnegative");
  const double peak = R.maxCoeff();
  if (peak == 0.0) return kInfiniteGamma;

  const double target = r * r;
  const double tol = 1e-10 * std::max(1.0, target);

  double offset = 1e-8;
  double lo = (1.0 + offset) * peak;
  while (ConstraintValue(R, lo) <= target) {
    // Very large radii put the root even closer to max R.
    offset *= 1e-2;
    if (offset < 1e-15) Throw(ErrorCode::kBracketFailure, "root too close to max R");
    lo = (1.0 + offset) * peak;
  }
  double hi = 2.0 * lo;
  int doublings = 0;
  while (ConstraintValue(R, hi) >= target) {
    if (++doublings > 200) {
      Throw(ErrorCode::kBracketFailure, "no upper bracket after 200 doublings");
    }
    lo = hi;
    hi *= 2.0;
  }

  // Safeguarded Newton on h = g^{-1/2}, which is nearly affine in gamma close
  // to the pole at max R; bisection whenever the step leaves the bracket.
  double gamma = lo;
  for (int it = 0; it < 400; ++it) {
    const Eigen::ArrayXd ratio = R.array() / (gamma - R.array());
    const double g = ratio.square().mean();
    if (std::abs(g - target) <= tol) break;
    if (g > target) {
      lo = gamma;
    } else {
      hi = gamma;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double dg = -2.0 * (ratio.square() / (gamma - R.array())).mean();
    const double h = 1.0 / std::sqrt(g), dh = -0.5 * dg / (g * std::sqrt(g));
    double next = gamma - (h - 1.0 / r) / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    gamma = next;
  }
  return gamma;
}

Vector WorstCaseDensity(const Vector& R, double gamma) {
  if (!std::isfinite(gamma)) return Vector::Ones(R.size());
  return (1.0 - R.array() / gamma).square().inverse();
}

WorstCaseValue WorstCaseForDensity(const Vector& R, double r) {
  WorstCaseValue out;
  out.gamma = BisectGamma(R, r);
  out.value = R.dot(WorstCaseDensity(R, out.gamma)) / static_cast<double>(R.size());
  return out;
}

FrankWolfeSolver::FrankWolfeSolver(const RiccatiData& ricc, FrequencyGrid grid, double radius)
    : ricc_(ricc),
      grid_(grid),
      radius_(radius),
      table_(ricc, grid),
      X_(SolveDiscreteLyapunov(ricc.Abar, ricc.Cbar.transpose() * ricc.Cbar)) {
  Require(radius > 0.0, "radius must be positive");
}

SolverState FrankWolfeSolver::Initial() const {
  return Evaluate(0, SpectrumSamples::Constant(grid_, 1.0));
}

SolverState FrankWolfeSolver::Evaluate(int k, SpectrumSamples M) const {
  Require(M.grid == grid_, "iterate grid differs from the solver grid");
  SolverState s{k, M, SpectralFactorDft(M), {}, {}, {}, 0.0, 0.0, 2.0 / (k + 2.0)};
  s.param.Gamma = ComputeGamma(s.L, table_);
  s.R = GradientOnGrid(s.param.Gamma, s.L, table_);
  s.param.gamma = BisectGamma(s.R, radius_);
  s.M_tilde = WorstCaseDensity(s.R, s.param.gamma);
  s.gap = s.R.dot(s.M_tilde - s.M.values) / static_cast<double>(grid_.size());
  s.objective = ObjectiveFromGamma(s.param.Gamma);
  return s;
}

SolverState FrankWolfeSolver::Step(const SolverState& state) const {
  Vector next = (1.0 - state.step) * state.M.values + state.step * state.M_tilde;
  return Evaluate(state.k + 1, SpectrumSamples(grid_, std::move(next)));
}

double FrankWolfeSolver::Objective(const SpectrumSamples& M) const {
  return ObjectiveFromGamma(ComputeGamma(SpectralFactorDft(M), table_));
}

double FrankWolfeSolver::ObjectiveFromGamma(const CVector& Gamma) const {
  return (Gamma.adjoint() * X_.cast<Complex>() * Gamma)(0, 0).real();
}

SolverState FrankWolfeStep(const SolverState& state, const RiccatiData& ricc, double r) {
  return FrankWolfeSolver(ricc, state.M.grid, r).Step(state);
}

SynthesisResult Synthesize(const StateSpaceModel& model, const RiccatiData& ricc, double r,
                           const SolverConfig& config) {
  Require(config.max_iterations > 0, "max_iterations must be positive");
  Require(config.tol > 0.0, "tol must be positive");
  RequireAssumptions(model);
  const FrequencyGrid grid(config.grid_size);
  const FrankWolfeSolver solver(ricc, grid, r);

  std::vector<IterationRecord> trace;
  double change = 0.0;
  bool converged = false;
  SolverState state = solver.Initial();
  for (int it = 0; it < config.max_iterations; ++it) {
    if (config.record_trace) {
      trace.push_back({state.k, state.objective, state.gap, state.param.gamma, state.step});
    }
    SolverState next = solver.Step(state);
    change = (next.M.values - state.M.values).norm() / state.M.values.norm();
    state = std::move(next);
    if (change <= config.tol) {
      converged = true;
      break;
    }
  }

  double residual = 0.0;
  for (int n = 0; n < grid.size(); ++n) {
    double nstar = 1.0;
    if (!state.param.degenerate()) {
      const double s2 = (solver.table().cr(n) * state.param.Gamma).squaredNorm();
      nstar = 0.25 * std::pow(1.0 + std::sqrt(1.0 + 4.0 * s2 / state.param.gamma), 2);
    }
    residual = std::max(residual, std::abs(state.M.values(n) - nstar) / nstar);
  }
  const double bw_error = std::abs(BwSquared(state.M.values) - r * r) / (r * r);
  const double regret = WorstCaseRegret(state.param, ricc, grid);
  return SynthesisResult{state.param, std::move(state.M), std::move(state.L), r, regret,
                         state.k, change, residual, bw_error, converged, std::move(trace)};
}

SynthesisResult Synthesize(const StateSpaceModel& model, double r, const SolverConfig& config) {
  RequireAssumptions(model);
  return Synthesize(model, SolveDare(model), r, config);
}

double EvalNstar(const GammaParameter& param, const RiccatiData& ricc, Complex z) {
  if (param.degenerate()) return 1.0;
  const double s2 = AnticausalPartTL(param.Gamma, ricc, z).squaredNorm();
  return 0.25 * std::pow(1.0 + std::sqrt(1.0 + 4.0 * s2 / param.gamma), 2);
}

SpectrumSamples SampleNstar(const GammaParameter& param, const RiccatiData& ricc,
                            const FrequencyGrid& grid) {
  Vector values(grid.size());
  if (param.degenerate()) return SpectrumSamples(grid, Vector::Ones(grid.size()));
  const ResolventTable table(ricc, grid);
  for (int n = 0; n < grid.size(); ++n) {
    const double s2 = (table.cr(n) * param.Gamma).squaredNorm();
    values(n) = 0.25 * std::pow(1.0 + std::sqrt(1.0 + 4.0 * s2 / param.gamma), 2);
  }
  return SpectrumSamples(grid, std::move(values));
}

double WorstCaseRegret(const GammaParameter& param, const RiccatiData& ricc,
                       const FrequencyGrid& check_grid) {
  const Matrix X = SolveDiscreteLyapunov(ricc.Abar, ricc.Cbar.transpose() * ricc.Cbar);
  const double value = (param.Gamma.adjoint() * X.cast<Complex>() * param.Gamma)(0, 0).real();

  const Eigen::Index nx = ricc.Abar.rows();
  const CMatrix Abar = ricc.Abar.cast<Complex>();
  const CMatrix Cbar = ricc.Cbar.cast<Complex>();
  double average = 0.0;
  for (int n = 0; n < check_grid.size(); ++n) {
    CMatrix lhs = CMatrix::Identity(nx, nx) - check_grid.point(n) * Abar;
    average += (Cbar * lhs.partialPivLu().solve(param.Gamma)).squaredNorm();
  }
  average /= static_cast<double>(check_grid.size());
  if (std::abs(value - average) > 1e-6 * std::max(std::abs(value), 1e-300) && value != 0.0) {
    Throw(ErrorCode::kIllConditioned, "Lyapunov and grid evaluations of the regret disagree (" +
                                          std::to_string(value) + " vs " +
                                          std::to_string(average) + ")");
  }
  return value;
}

CMatrix EvalDrroController(const StateSpaceModel& model, const RiccatiData& ricc,
                           const CVector& Gamma, Complex L, Complex z) {
  if (std::abs(L) < kMinFactorModulus) Throw(ErrorCode::kDivisionNearZero, "|L(z)| below 1e-10");
  const CVector S = AnticausalPartTL(Gamma, ricc, z);
  return EvalNoncausalK0(model, z) - EvalDelta(model, ricc, z).delta_inv * S / L;
}

Vector ControllerRegretDensity(const StateSpaceModel& model, const RiccatiData& ricc,
                               const TransferFunction& K, const FrequencyGrid& grid) {
  Vector R(grid.size());
  for (int n = 0; n < grid.size(); ++n) {
    const Complex z = grid.point(n);
    const CMatrix diff = K(z) - EvalNoncausalK0(model, z);
    R(n) = (EvalDelta(model, ricc, z).delta * diff).squaredNorm();
  }
  return R;
}

void WriteTraceCsv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << "k,objective,gap,gamma,step\n";
  out.precision(17);
  for (const auto& t : trace) {
    out << t.k << ',' << t.objective << ',' << t.gap << ',' << t.gamma << ',' << t.step << '\n';
  }
}

}  // namespace drro
