#include "drro/realize.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/LU>

#include "drro/linalg.hpp"
#include "drro/model_io.hpp"

namespace drro {

Complex FactorRealization::Evaluate(Complex z) const {
  const double scale = std::sqrt(Dtil);
  if (order() == 0) return scale;
  const int m = order();
  CMatrix lhs = z * CMatrix::Identity(m, m) - Atil.cast<Complex>();
  const Complex tail = (Ctil.cast<Complex>() * lhs.partialPivLu().solve(Btil.cast<Complex>()))(0, 0);
  return (1.0 + tail) * scale;
}

FactorRealization RealizeFactor(const PolynomialFactor& num, const PolynomialFactor& den) {
  Require(num.coeffs.size() > 0 && den.coeffs.size() > 0, "empty factor");
  const double den_scale = den.coeffs.cwiseAbs().maxCoeff();
  if (!(std::abs(den.coeffs(0)) > 1e-12 * den_scale)) {
    Throw(ErrorCode::kDegenerateDenominator, "leading denominator coefficient is zero");
  }
  const int m = std::max(num.degree(), den.degree());
  Vector a = Vector::Zero(m + 1);
  Vector b = Vector::Zero(m + 1);
  a.head(num.coeffs.size()) = num.coeffs / num.coeffs(0);
  b.head(den.coeffs.size()) = den.coeffs / den.coeffs(0);
  const double d = num.coeffs(0) / den.coeffs(0);
  Require(d > 0.0, "factor must have a positive leading coefficient");

  FactorRealization out;
  out.Dtil = d * d;
  out.Atil = Matrix::Zero(m, m);
  out.Btil = Matrix::Zero(m, 1);
  out.Ctil = Matrix::Zero(1, m);
  if (m == 0) return out;
  out.Atil.row(0) = -b.tail(m).transpose();
  if (m > 1) out.Atil.bottomLeftCorner(m - 1, m - 1).setIdentity();
  out.Btil(0, 0) = 1.0;
  out.Ctil = (a.tail(m) - b.tail(m)).transpose();
  return out;
}

FactorRealization TrivialFactor() {
  return FactorRealization{Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), 1.0};
}

Matrix SolveLyapunovU(const StateSpaceModel& model, const RiccatiData& ricc,
                      const FactorRealization& fac) {
  const Matrix AkT = ricc.A_k.transpose();
  const Matrix rhs = AkT * ricc.P * model.Bw * fac.Ctil;
  return SolveStein(AkT, fac.Atil, rhs).X;
}

CMatrix RealizedController::Evaluate(Complex z) const {
  const int n = order();
  CMatrix out = J.cast<Complex>();
  if (n == 0) return out;
  CMatrix lhs = z * CMatrix::Identity(n, n) - F.cast<Complex>();
  out += H.cast<Complex>() * lhs.partialPivLu().solve(G.cast<Complex>());
  return out;
}

RealizedController AssembleController(const StateSpaceModel& model, const RiccatiData& ricc,
                                      const FactorRealization& fac, const Matrix& U) {
  const int m = fac.order();
  const int nx = model.nx();
  const int nu = model.nu();
  Require(U.rows() == nx && U.cols() == m, "U must be nx x order(factor)");

  const Matrix R2 = ricc.Rbar * ricc.Rbar;
  const Matrix AtK = fac.Atil - fac.Btil * fac.Ctil;
  const Matrix gain = R2 * model.Bu.transpose();  // (I + Bu'PBu)^{-1} Bu'
  const Matrix feed = ricc.P * model.Bw + U * fac.Btil;

  RealizedController c;
  c.plant_states = nx;
  c.F = Matrix::Zero(m + nx, m + nx);
  c.F.topLeftCorner(m, m) = AtK;
  c.F.bottomLeftCorner(nx, m) = -model.Bu * gain * U;
  c.F.bottomRightCorner(nx, nx) = ricc.A_k;
  c.G = Matrix(m + nx, 1);
  c.G.topRows(m) = AtK * fac.Btil;
  c.G.bottomRows(nx) = model.Bw - model.Bu * gain * feed;
  c.H = Matrix(nu, m + nx);
  c.H.leftCols(m) = -gain * U;
  c.H.rightCols(nx) = -ricc.K_lqr;
  c.J = -gain * feed;
  return c;
}

RealizedController RealizeRationalController(const StateSpaceModel& model,
                                             const RiccatiData& ricc,
                                             const FactorRealization& fac) {
  return AssembleController(model, ricc, fac, SolveLyapunovU(model, ricc, fac));
}

RealizedController RealizeH2(const StateSpaceModel& model, const RiccatiData& ricc) {
  const FactorRealization fac = TrivialFactor();
  return AssembleController(model, ricc, fac, Matrix::Zero(model.nx(), 0));
}

CVector FactorGamma(const RiccatiData& ricc, const FactorRealization& fac, const Matrix& U) {
  Matrix g = ricc.Bbar;
  if (fac.order() > 0) g += ricc.A_k.transpose() * U * fac.Btil;
  return (std::sqrt(fac.Dtil) * g).cast<Complex>().col(0);
}

CMatrix EvalRationalController(const StateSpaceModel& model, const RiccatiData& ricc,
                               const FactorRealization& fac, const CVector& gamma, Complex z) {
  const CVector S = AnticausalPartTL(gamma, ricc, z);
  return EvalNoncausalK0(model, z) - EvalDelta(model, ricc, z).delta_inv * S / fac.Evaluate(z);
}

ClosedLoopReport ClosedLoopCheck(const StateSpaceModel& model, const RealizedController& ctrl) {
  const int nx = model.nx();
  const int p = ctrl.plant_states;
  Require(p == 0 || p == nx, "plant_states must be 0 or nx");
  Require(ctrl.H.rows() == model.nu(), "controller output count must equal nu");
  const int q = ctrl.order() - p;  // free controller states
  Require(q >= 0, "controller order smaller than plant_states");

  // Joint state (x, xi_free); replicated states are replaced by x.
  ClosedLoopReport report;
  report.A_cl = Matrix::Zero(nx + q, nx + q);
  Matrix Hx = Matrix::Zero(model.nu(), nx);
  if (p > 0) Hx = ctrl.H.rightCols(p);
  report.A_cl.topLeftCorner(nx, nx) = model.A + model.Bu * Hx;
  report.A_cl.topRightCorner(nx, q) = model.Bu * ctrl.H.leftCols(q);
  report.A_cl.bottomRightCorner(q, q) = ctrl.F.topLeftCorner(q, q);
  if (p > 0) report.A_cl.bottomLeftCorner(q, nx) = ctrl.F.topRightCorner(q, p);
  report.spectral_radius = SpectralRadius(report.A_cl);
  report.stable = report.spectral_radius < 1.0 - 1e-9;
  return report;
}

void SaveController(const std::filesystem::path& path, const RealizedController& ctrl) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path.string());
  out << "# x' = F x + G w, u = H x + J w\n";
  WriteNamedMatrices(out, {{"F", ctrl.F},
                           {"G", ctrl.G},
                           {"H", ctrl.H},
                           {"J", ctrl.J},
                           {"plant_states", Matrix::Constant(1, 1, ctrl.plant_states)}});
}

RealizedController LoadController(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, "cannot read " + path.string());
  const NamedMatrices named = ReadNamedMatrices(in);
  auto get = [&](const char* name) {
    const Matrix* m = FindMatrix(named, name);
    if (m == nullptr) Throw(ErrorCode::kIo, std::string("controller file lacks ") + name);
    return *m;
  };
  RealizedController c{get("F"), get("G"), get("H"), get("J"), 0};
  if (const Matrix* p = FindMatrix(named, "plant_states")) c.plant_states = static_cast<int>((*p)(0, 0));
  const int n = c.order();
  if (c.F.cols() != n || c.G.rows() != n || c.H.cols() != n || c.J.rows() != c.H.rows() ||
      c.J.cols() != c.G.cols() || c.plant_states < 0 || c.plant_states > n) {
    Throw(ErrorCode::kIo, "inconsistent controller dimensions in " + path.string());
  }
  return c;
}

}  // namespace drro
