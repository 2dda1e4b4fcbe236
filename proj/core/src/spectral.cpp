#include "drro/spectral.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

namespace drro {

FrequencyGrid::FrequencyGrid(int size) : size_(size) {
  Require(size >= 2 && (size & (size - 1)) == 0, "grid size must be a power of two >= 2");
}

double FrequencyGrid::angle(int n) const {
  return 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(size_);
}

Complex FrequencyGrid::point(int n) const { return std::polar(1.0, angle(n)); }

std::vector<Complex> FrequencyGrid::points() const {
  std::vector<Complex> out(static_cast<size_t>(size_));
  for (int n = 0; n < size_; ++n) out[static_cast<size_t>(n)] = point(n);
  return out;
}

SpectrumSamples::SpectrumSamples(FrequencyGrid g, Vector v) : grid(g), values(std::move(v)) {
  Require(values.size() == grid.size(), "spectrum length must match the grid size");
}

SpectrumSamples SpectrumSamples::Constant(FrequencyGrid g, double c) {
  return SpectrumSamples(g, Vector::Constant(g.size(), c));
}

bool SpectrumSamples::IsValid(double tol) const {
  const int N = grid.size();
  if (!(values.minCoeff() > 0.0)) return false;
  for (int n = 1; n < N; ++n) {
    const double a = values(n), b = values(N - n);
    if (std::abs(a - b) > tol * std::max(std::abs(a), std::abs(b))) return false;
  }
  return true;
}

double FactorSamples::NyquistTail() const { return std::abs(cepstrum(cepstrum.size() - 1)); }

bool FactorSamples::Aliasing() const {
  return NyquistTail() > 1e-6 * std::max(1.0, std::abs(cepstrum(0)));
}

Complex FactorSamples::Evaluate(Complex z) const {
  const Eigen::Index half = cepstrum.size() - 1;
  const Complex zinv = 1.0 / z;
  // Horner in z^{-1} over lambda_1..lambda_{half-1}.
  Complex acc = 0.0;
  for (Eigen::Index k = half - 1; k >= 1; --k) acc = (acc + cepstrum(k)) * zinv;
  const double nyquist = std::cos(static_cast<double>(half) * std::arg(z));
  return std::exp(0.5 * cepstrum(0) + acc + 0.5 * cepstrum(half) * nyquist);
}

FactorSamples SpectralFactorDft(const SpectrumSamples& spectrum, double min_value) {
  const int N = spectrum.grid.size();
  const double lowest = spectrum.values.minCoeff();
  if (!(lowest >= min_value)) {
    Throw(ErrorCode::kNonPositiveSpectrum,
          "spectrum minimum " + std::to_string(lowest) + " below " + std::to_string(min_value));
  }

  Eigen::FFT<double> fft;
  std::vector<Complex> log_m(static_cast<size_t>(N));
  for (int n = 0; n < N; ++n) log_m[static_cast<size_t>(n)] = std::log(spectrum.values(n));
  std::vector<Complex> lambda;
  fft.inv(lambda, log_m);

  const int half = N / 2;
  FactorSamples out{spectrum.grid, CVector(N), Vector(half + 1)};
  for (int k = 0; k <= half; ++k) out.cepstrum(k) = lambda[static_cast<size_t>(k)].real();

  // sum_k c_k z_n^{-k} is the forward DFT of the causal half-cepstrum.
  std::vector<Complex> causal(static_cast<size_t>(N), Complex(0.0));
  causal[0] = 0.5 * out.cepstrum(0);
  for (int k = 1; k < half; ++k) causal[static_cast<size_t>(k)] = out.cepstrum(k);
  std::vector<Complex> exponent;
  fft.fwd(exponent, causal);

  for (int n = 0; n < N; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    out.values(n) = std::exp(exponent[static_cast<size_t>(n)] + 0.5 * sign * out.cepstrum(half));
  }
  return out;
}

ResolventTable::ResolventTable(const RiccatiData& ricc, const FrequencyGrid& grid) : grid_(grid) {
  const Eigen::Index nx = ricc.Abar.rows();
  const CMatrix Abar = ricc.Abar.cast<Complex>();
  const CMatrix Bbar = ricc.Bbar.cast<Complex>();
  const CMatrix Cbar = ricc.Cbar.cast<Complex>();
  const CMatrix I = CMatrix::Identity(nx, nx);
  rb_.reserve(static_cast<size_t>(grid.size()));
  cr_.reserve(static_cast<size_t>(grid.size()));
  for (int n = 0; n < grid.size(); ++n) {
    const CMatrix resolvent = (I - grid.point(n) * Abar).partialPivLu().inverse();
    rb_.push_back(resolvent * Bbar.col(0));
    cr_.push_back(Cbar * resolvent);
  }
}

CVector ComputeGamma(const FactorSamples& factor, const ResolventTable& table) {
  Require(factor.grid == table.grid(), "factor and resolvent table grids differ");
  const int N = factor.grid.size();
  CVector gamma = CVector::Zero(table.rb(0).size());
  for (int n = 0; n < N; ++n) gamma += table.rb(n) * factor.values(n);
  return gamma / static_cast<double>(N);
}

CVector ComputeGamma(const FactorSamples& factor, const RiccatiData& ricc) {
  return ComputeGamma(factor, ResolventTable(ricc, factor.grid));
}

CVector AnticausalPartTL(const CVector& gamma, const RiccatiData& ricc, Complex z) {
  const Eigen::Index nx = ricc.Abar.rows();
  CMatrix lhs = (1.0 / z) * CMatrix::Identity(nx, nx) - ricc.Abar.cast<Complex>();
  return ricc.Cbar.cast<Complex>() * lhs.partialPivLu().solve(gamma);
}

void WriteSpectrumCsv(std::ostream& out, const SpectrumSamples& spectrum) {
  out << "index,value\n";
  out.precision(17);
  for (int n = 0; n < spectrum.grid.size(); ++n) out << n << ',' << spectrum.values(n) << '\n';
}

SpectrumSamples ReadSpectrumCsv(std::istream& in) {
  std::string line;
  std::vector<double> values;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("index", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) Throw(ErrorCode::kIo, "bad spectrum record: " + line);
    const long index = std::stol(line.substr(0, comma));
    if (index != static_cast<long>(values.size())) {
      Throw(ErrorCode::kIo, "spectrum indices must be consecutive from 0");
    }
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  Vector v = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return SpectrumSamples(FrequencyGrid(static_cast<int>(values.size())), v);
}

}  // namespace drro
