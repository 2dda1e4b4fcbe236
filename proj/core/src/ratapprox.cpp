#include "drro/ratapprox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>
#include <unsupported/Eigen/Polynomials>

#include "drro/lp.hpp"

namespace drro {
namespace {

constexpr double kCircleTol = 1e-7;

// [1, 2cos(w), ..., 2cos(mw)]
Vector CosineRow(double omega, int m) {
  Vector row(m + 1);
  row(0) = 1.0;
  for (int k = 1; k <= m; ++k) row(k) = 2.0 * std::cos(k * omega);
  return row;
}

double Median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index n = v.size();
  return n % 2 == 1 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

}  // namespace

double TrigPolynomial::Evaluate(double omega) const {
  return CosineRow(omega, degree()).dot(coeffs);
}

Vector TrigPolynomial::Evaluate(const FrequencyGrid& grid) const {
  Vector out(grid.size());
  for (int n = 0; n < grid.size(); ++n) out(n) = Evaluate(grid.angle(n));
  return out;
}

Complex PolynomialFactor::Evaluate(Complex z) const {
  const Complex zinv = 1.0 / z;
  Complex acc = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * zinv + coeffs(k);
  return acc;
}

double PositivityMargin(const SpectrumSamples& N, const RationalFitOptions& options) {
  return options.delta >= 0.0 ? options.delta : 1e-6 * Median(N.values);
}

std::optional<RationalSpectrum> FeasibilityCheck(const SpectrumSamples& N, int m, double eps,
                                                 double delta,
                                                 const RationalFitOptions& options) {
  Require(m >= 0, "degree must be nonnegative");
  Require(eps >= 0.0, "eps must be nonnegative");
  Require(delta >= 0.0 && delta < 1.0, "positivity margin must lie in [0, 1) since q_0 = 1");
  Require(N.IsValid(), "samples must be positive and conjugate-symmetric");

  // Real spectra are even in frequency: the half grid carries every constraint.
  const int half = N.grid.size() / 2;
  const int freqs = half + 1;
  const int nvar = 2 * m + 1;
  const int per_freq = m > 0 ? 4 : 3;
  const int rows = per_freq * freqs + 2 * nvar;
  Matrix A = Matrix::Zero(rows, nvar);
  Vector b(rows);

  int r = 0;
  for (int n = 0; n < freqs; ++n) {
    const Vector c = CosineRow(N.grid.angle(n), m);
    const double v = N.values(n);
    // P - (N + eps) Q <= 0
    A.row(r).head(m + 1) = c.transpose();
    A.row(r).tail(m) = -(v + eps) * c.tail(m).transpose();
    b(r++) = v + eps;
    // (N - eps) Q - P <= 0
    A.row(r).head(m + 1) = -c.transpose();
    A.row(r).tail(m) = (v - eps) * c.tail(m).transpose();
    b(r++) = -(v - eps);
    // P >= delta
    A.row(r).head(m + 1) = -c.transpose();
    b(r++) = -delta;
    if (m > 0) {
      // Q >= delta
      A.row(r).tail(m) = -c.tail(m).transpose();
      b(r++) = 1.0 - delta;
    }
  }
  // Box rows keep the min-max problem bounded; they are far from active.
  const double bound = 1e6 * std::max(1.0, N.values.maxCoeff());
  for (int j = 0; j < nvar; ++j) {
    A(r, j) = 1.0;
    b(r++) = bound;
    A(r, j) = -1.0;
    b(r++) = bound;
  }

  const auto x = FindFeasiblePoint(A, b, options.lp_tol, options.max_pivots);
  if (!x) return std::nullopt;

  RationalSpectrum out;
  out.degree = m;
  out.P.coeffs = x->head(m + 1);
  out.Q.coeffs = Vector::Zero(m + 1);
  out.Q.coeffs(0) = 1.0;
  out.Q.coeffs.tail(m) = x->tail(m);
  double err = 0.0;
  for (int n = 0; n < N.grid.size(); ++n) {
    const double w = N.grid.angle(n);
    err = std::max(err, std::abs(out.P.Evaluate(w) / out.Q.Evaluate(w) - N.values(n)));
  }
  out.epsilon = err;
  return out;
}

RationalSpectrum BestEpsilon(const SpectrumSamples& N, int m, const RationalFitOptions& options) {
  const double delta = PositivityMargin(N, options);
  double lo = 0.0;
  double hi = N.values.maxCoeff() - N.values.minCoeff();
  auto best = FeasibilityCheck(N, m, hi, delta, options);
  if (!best) {
    Throw(ErrorCode::kSolverStall, "feasibility check failed at the trivial upper bracket");
  }
  const double tol = options.relative_tol * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto fit = FeasibilityCheck(N, m, mid, delta, options)) {
      hi = mid;
      best = std::move(fit);
    } else {
      lo = mid;
    }
  }
  return *best;
}

std::optional<RationalSpectrum> LowestDegree(const SpectrumSamples& N, double eps,
                                             int max_degree, const RationalFitOptions& options) {
  const double delta = PositivityMargin(N, options);
  for (int m = 0; m <= max_degree; ++m) {
    if (auto fit = FeasibilityCheck(N, m, eps, delta, options)) return fit;
  }
  return std::nullopt;
}

PolynomialFactor FactorPolynomial(const TrigPolynomial& P) {
  Require(P.coeffs.size() > 0, "empty polynomial");
  const double scale = P.coeffs.cwiseAbs().maxCoeff();
  if (!(P.coeffs(0) > 0.0)) {
    Throw(ErrorCode::kNonPositiveSpectrum, "constant coefficient of P must be positive");
  }
  int m = P.degree();
  while (m > 0 && std::abs(P.coeffs(m)) <= 1e-14 * scale) --m;

  PolynomialFactor out;
  if (m == 0) {
    out.coeffs = Vector::Constant(1, std::sqrt(P.coeffs(0)));
    out.roots = CVector(0);
    return out;
  }

  // z^m P(z) in ascending powers of z.
  Vector poly(2 * m + 1);
  for (int j = 0; j <= 2 * m; ++j) poly(j) = P.coeffs(std::abs(j - m));
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(poly);
  const CVector all = solver.roots();

  std::vector<Complex> inside;
  for (Eigen::Index i = 0; i < all.size(); ++i) {
    const Complex rho = all(i);
    if (std::abs(std::abs(rho) - 1.0) < kCircleTol) {
      Throw(ErrorCode::kRootOnCircle,
            "root on the unit circle at frequency " + std::to_string(std::arg(rho)) + " rad");
    }
    if (std::abs(rho) < 1.0) inside.push_back(rho);
  }
  if (static_cast<int>(inside.size()) != m) {
    Throw(ErrorCode::kRootOnCircle, "roots do not split evenly across the unit circle");
  }
  // Deterministic order: by argument, then modulus.
  std::sort(inside.begin(), inside.end(), [](Complex a, Complex b) {
    if (std::arg(a) != std::arg(b)) return std::arg(a) < std::arg(b);
    return std::abs(a) < std::abs(b);
  });

  // prod (1 - rho_i z^{-1}) in powers of z^{-1}.
  CVector g = CVector::Zero(m + 1);
  g(0) = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int k = i + 1; k >= 1; --k) g(k) -= inside[static_cast<size_t>(i)] * g(k - 1);
  }
  const Vector gr = g.real();
  const double l0 = std::sqrt(P.coeffs(0) / gr.squaredNorm());
  out.coeffs = l0 * gr;
  out.roots = Eigen::Map<CVector>(inside.data(), m);
  return out;
}

TrigPolynomial Expand(const PolynomialFactor& L) {
  const int m = L.degree();
  TrigPolynomial P{Vector::Zero(m + 1)};
  for (int k = 0; k <= m; ++k) {
    P.coeffs(k) = L.coeffs.head(m + 1 - k).dot(L.coeffs.tail(m + 1 - k));
  }
  return P;
}

std::pair<PolynomialFactor, PolynomialFactor> RationalFactor(const RationalSpectrum& spec) {
  return {FactorPolynomial(spec.P), FactorPolynomial(spec.Q)};
}

std::optional<Matrix> GramCertificate(const TrigPolynomial& P, int max_iterations, double tol) {
  const int m = P.degree();
  const int n = m + 1;
  const double scale = std::max(1.0, P.coeffs.cwiseAbs().maxCoeff());

  // Orthogonal projection onto {G = G' : sum of the k-th diagonal = p_k}.
  auto project_affine = [&](Matrix& G) {
    for (int k = 0; k <= m; ++k) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += G(i, i - k);
      const double shift = (P.coeffs(k) - s) / (n - k);
      for (int i = k; i < n; ++i) {
        G(i, i - k) += shift;
        if (k > 0) G(i - k, i) += shift;
      }
    }
  };
  auto residual = [&](const Matrix& G) {
    double worst = 0.0;
    for (int k = 0; k <= m; ++k) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += G(i, i - k);
      worst = std::max(worst, std::abs(s - P.coeffs(k)));
    }
    return worst;
  };

  Matrix G = Matrix::Zero(n, n);
  project_affine(G);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Vector lambda = es.eigenvalues().cwiseMax(0.0);
    Matrix psd = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
    if (residual(psd) <= tol * scale) return psd;
    G = psd;
    project_affine(G);
  }
  return std::nullopt;
}

std::string RationalSpectrumToJson(const RationalSpectrum& spec) {
  nlohmann::ordered_json j;
  j["degree"] = spec.degree;
  j["epsilon"] = spec.epsilon;
  j["P"] = std::vector<double>(spec.P.coeffs.data(), spec.P.coeffs.data() + spec.P.coeffs.size());
  j["Q"] = std::vector<double>(spec.Q.coeffs.data(), spec.Q.coeffs.data() + spec.Q.coeffs.size());
  return j.dump(2) + "\n";
}

RationalSpectrum RationalSpectrumFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIo, std::string("rational spectrum document: ") + e.what());
  }
  try {
    RationalSpectrum spec;
    spec.degree = j.at("degree").get<int>();
    spec.epsilon = j.at("epsilon").get<double>();
    const auto p = j.at("P").get<std::vector<double>>();
    const auto q = j.at("Q").get<std::vector<double>>();
    if (static_cast<int>(p.size()) != spec.degree + 1 || q.size() != p.size()) {
      Throw(ErrorCode::kIo, "coefficient lists must have degree + 1 entries");
    }
    spec.P.coeffs = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    spec.Q.coeffs = Eigen::Map<const Vector>(q.data(), static_cast<Eigen::Index>(q.size()));
    return spec;
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kIo, std::string("rational spectrum document: ") + e.what());
  }
}

}  // namespace drro
